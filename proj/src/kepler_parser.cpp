#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "timesplit/error.hpp"
#include "timesplit/kepler.hpp"

namespace timesplit::kepler {

const Node* DftModel::find(std::string_view name) const {
    for (const auto& n : nodes) {
        if (n.name == name) {
            return &n;
        }
    }
    return nullptr;
}

namespace {

enum class Tok { string, word, number, tilde, lparen, rparen, comma, semicolon, end };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

std::string describe(const Token& t) {
    switch (t.kind) {
        case Tok::string: return "\"" + t.text + "\"";
        case Tok::end: return "end of input";
        default: return "'" + t.text + "'";
    }
}

class Lexer {
 public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> tokenize() {
        std::vector<Token> tokens;
        while (true) {
            skip_blank();
            const std::size_t line = line_;
            const std::size_t column = column_;
            if (pos_ >= text_.size()) {
                tokens.push_back({Tok::end, "", line, column});
                return tokens;
            }
            const char c = text_[pos_];
            if (c == '"') {
                advance();
                std::string value;
                while (pos_ < text_.size() && text_[pos_] != '"') {
                    if (text_[pos_] == '\n') {
                        throw ParseError("unterminated string", line, column);
                    }
                    value += text_[pos_];
                    advance();
                }
                if (pos_ >= text_.size()) {
                    throw ParseError("unterminated string", line, column);
                }
                advance();
                if (value.empty()) {
                    throw ParseError("empty name", line, column);
                }
                tokens.push_back({Tok::string, std::move(value), line, column});
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string value;
                while (pos_ < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                    value += text_[pos_];
                    advance();
                }
                tokens.push_back({Tok::word, std::move(value), line, column});
            } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                tokens.push_back({Tok::number, lex_number(), line, column});
            } else {
                Tok kind;
                switch (c) {
                    case '~': kind = Tok::tilde; break;
                    case '(': kind = Tok::lparen; break;
                    case ')': kind = Tok::rparen; break;
                    case ',': kind = Tok::comma; break;
                    case ';': kind = Tok::semicolon; break;
                    default: throw ParseError(std::string("unexpected character '") + c + "'", line, column);
                }
                advance();
                tokens.push_back({kind, std::string(1, c), line, column});
            }
        }
    }

 private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_blank() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') {
                    advance();
                }
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                return;
            }
        }
    }

    std::string lex_number() {
        std::string value;
        auto digits = [&] {
            while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
                value += text_[pos_];
                advance();
            }
        };
        digits();
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            value += text_[pos_];
            advance();
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
                value += text_[pos_];
                advance();
            }
            digits();
        } else if (pos_ < text_.size() && text_[pos_] == '/') {
            value += text_[pos_];
            advance();
            digits();
        }
        return value;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

struct Located {
    std::size_t line;
    std::size_t column;
};

class Parser {
 public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    DftModel parse() {
        DftModel model;
        std::optional<Located> toplevel_at;
        while (peek().kind != Tok::end) {
            const Token& first = peek();
            if (first.kind == Tok::word && first.text == "toplevel") {
                next();
                const Token& name = expect(Tok::string, "node name");
                if (toplevel_at) {
                    throw ParseError("duplicate toplevel declaration", first.line, first.column);
                }
                model.toplevel = name.text;
                toplevel_at = Located{name.line, name.column};
                expect(Tok::semicolon, "';'");
                continue;
            }
            const Token& name = expect(Tok::string, "'toplevel' or a node name");
            if (!declared_.emplace(name.text, Located{name.line, name.column}).second) {
                throw ParseError("duplicate definition of \"" + name.text + "\"", name.line, name.column);
            }
            const Token& kind = expect(Tok::word, "node kind");
            if (kind.text == "and" || kind.text == "or" || kind.text == "pand") {
                Gate gate;
                gate.kind = kind.text == "and" ? GateKind::and_gate : kind.text == "or" ? GateKind::or_gate : GateKind::pand;
                gate.children = children(name.text);
                model.nodes.push_back({name.text, std::move(gate)});
            } else if (kind.text == "fail") {
                BasicEvent be;
                expect(Tok::tilde, "'~'");
                be.fail = distribution();
                if (peek().kind == Tok::word && peek().text == "repair") {
                    next();
                    expect(Tok::tilde, "'~'");
                    be.repair = distribution();
                }
                expect(Tok::semicolon, "';'");
                model.nodes.push_back({name.text, std::move(be)});
            } else if (kind.text == "rbox") {
                RepairBox box;
                box.name = name.text;
                const Token& policy = expect(Tok::word, "repair policy");
                if (policy.text == "prio") {
                    box.policy = RepairPolicy::prio;
                } else if (policy.text == "fcfs") {
                    box.policy = RepairPolicy::fcfs;
                } else {
                    throw ParseError("unknown repair policy '" + policy.text + "' (expected prio or fcfs)", policy.line,
                                     policy.column);
                }
                box.managed = children(name.text);
                model.rboxes.push_back(std::move(box));
            } else {
                throw ParseError("unsupported node kind '" + kind.text + "'", kind.line, kind.column);
            }
        }
        if (!toplevel_at) {
            const Token& end = peek();
            throw ParseError("missing toplevel declaration", end.line, end.column);
        }
        check(model, *toplevel_at);
        return model;
    }

 private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

    const Token& expect(Tok kind, const std::string& what) {
        const Token& t = peek();
        if (t.kind != kind) {
            throw ParseError("expected " + what + ", found " + describe(t), t.line, t.column);
        }
        return next();
    }

    std::vector<std::string> children(const std::string& parent) {
        std::vector<std::string> result;
        while (peek().kind == Tok::string) {
            const Token& child = next();
            for (const auto& seen : result) {
                if (seen == child.text) {
                    throw ParseError("\"" + child.text + "\" listed twice under \"" + parent + "\"", child.line,
                                     child.column);
                }
            }
            references_.push_back({parent, child.text, Located{child.line, child.column}});
            result.push_back(child.text);
        }
        if (result.empty()) {
            const Token& t = peek();
            throw ParseError("expected at least one child of \"" + parent + "\", found " + describe(t), t.line,
                             t.column);
        }
        expect(Tok::semicolon, "';'");
        return result;
    }

    Rational number() {
        const Token& t = expect(Tok::number, "number");
        try {
            return parse_rational(t.text);
        } catch (const std::invalid_argument& e) {
            throw ParseError(std::string("bad number '") + t.text + "': " + e.what(), t.line, t.column);
        }
    }

    model::Distribution distribution() {
        const Token& kind = expect(Tok::word, "distribution");
        expect(Tok::lparen, "'('");
        model::Distribution d;
        if (kind.text == "uniform") {
            const Rational a = number();
            expect(Tok::comma, "','");
            const Rational b = number();
            d = model::Distribution::uniform(a, b);
        } else if (kind.text == "exponential") {
            d = model::Distribution::exponential(number());
        } else {
            throw ParseError("unsupported distribution '" + kind.text + "'", kind.line, kind.column);
        }
        expect(Tok::rparen, "')'");
        return d;
    }

    void check(const DftModel& model, Located toplevel_at) {
        std::map<std::string, const Node*> nodes;
        for (const auto& n : model.nodes) {
            nodes[n.name] = &n;
        }
        std::set<std::string> boxes;
        for (const auto& b : model.rboxes) {
            boxes.insert(b.name);
        }
        if (!nodes.count(model.toplevel)) {
            throw ParseError("toplevel \"" + model.toplevel + "\" is not a gate or basic event", toplevel_at.line,
                             toplevel_at.column);
        }
        for (const auto& ref : references_) {
            auto it = nodes.find(ref.child);
            if (it == nodes.end()) {
                throw ParseError("unknown node \"" + ref.child + "\"", ref.at.line, ref.at.column);
            }
            if (boxes.count(ref.parent) && !std::holds_alternative<BasicEvent>(it->second->body)) {
                throw ParseError("repair box \"" + ref.parent + "\" can only manage basic events", ref.at.line,
                                 ref.at.column);
            }
        }
        std::map<std::string, std::string> managed_by;
        for (const auto& box : model.rboxes) {
            for (const auto& be : box.managed) {
                if (!managed_by.emplace(be, box.name).second) {
                    const auto& at = declared_.at(box.name);
                    throw ParseError("\"" + be + "\" is managed by both \"" + managed_by[be] + "\" and \"" + box.name + "\"",
                                     at.line, at.column);
                }
                if (!std::get<BasicEvent>(nodes[be]->body).repair) {
                    const auto& at = declared_.at(box.name);
                    throw ParseError("\"" + be + "\" has no repair distribution", at.line, at.column);
                }
            }
        }
        // Cycle detection over gate children.
        std::map<std::string, int> colour;
        std::function<void(const Node&)> visit = [&](const Node& n) {
            colour[n.name] = 1;
            if (const auto* gate = std::get_if<Gate>(&n.body)) {
                for (const auto& c : gate->children) {
                    const int state = colour[c];
                    if (state == 1) {
                        const auto& at = declared_.at(n.name);
                        throw ParseError("cycle through \"" + n.name + "\" and \"" + c + "\"", at.line, at.column);
                    }
                    if (state == 0) {
                        visit(*nodes.at(c));
                    }
                }
            }
            colour[n.name] = 2;
        };
        for (const auto& n : model.nodes) {
            if (colour[n.name] == 0) {
                visit(n);
            }
        }
    }

    struct Reference {
        std::string parent;
        std::string child;
        Located at;
    };

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::map<std::string, Located> declared_;
    std::vector<Reference> references_;
};

std::string quoted(const std::string& name) { return "\"" + name + "\""; }

}  // namespace

DftModel parse(std::string_view text) { return Parser(Lexer(text).tokenize()).parse(); }

std::string print(const DftModel& model) {
    std::ostringstream out;
    out << "toplevel " << quoted(model.toplevel) << ";\n";
    for (const auto& n : model.nodes) {
        out << quoted(n.name);
        if (const auto* gate = std::get_if<Gate>(&n.body)) {
            out << (gate->kind == GateKind::and_gate ? " and" : gate->kind == GateKind::or_gate ? " or" : " pand");
            for (const auto& c : gate->children) {
                out << " " << quoted(c);
            }
        } else {
            const auto& be = std::get<BasicEvent>(n.body);
            out << " fail~" << be.fail.to_string();
            if (be.repair) {
                out << " repair~" << be.repair->to_string();
            }
        }
        out << ";\n";
    }
    for (const auto& box : model.rboxes) {
        out << quoted(box.name) << " rbox " << (box.policy == RepairPolicy::prio ? "prio" : "fcfs");
        for (const auto& be : box.managed) {
            out << " " << quoted(be);
        }
        out << ";\n";
    }
    return out.str();
}

}  // namespace timesplit::kepler
