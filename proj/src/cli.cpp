#include "timesplit/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "timesplit/error.hpp"
#include "timesplit/importance.hpp"
#include "timesplit/kepler.hpp"
#include "timesplit/model.hpp"
#include "timesplit/res.hpp"
#include "timesplit/scg.hpp"
#include "timesplit/sim.hpp"

namespace timesplit::cli {

namespace {

using nlohmann::json;

std::optional<model::FlatModel> load(const std::string& path, double clip_quantile, std::ostream& err,
                                     bool show_warnings = false) {
    std::ifstream in(path);
    if (!in) {
        err << path << ": error: cannot read model file\n";
        return std::nullopt;
    }
    std::stringstream text;
    text << in.rdbuf();
    try {
        auto dft = kepler::parse(text.str());
        for (auto& node : dft.nodes) {
            if (auto* be = std::get_if<kepler::BasicEvent>(&node.body)) {
                be->fail.clip_quantile = clip_quantile;
                if (be->repair) {
                    be->repair->clip_quantile = clip_quantile;
                }
            }
        }
        const auto network = kepler::compile(dft);
        const auto diagnostics = model::validate(network);
        for (const auto& d : diagnostics) {
            if (d.severity == model::Diagnostic::Severity::warning && !show_warnings) {
                continue;
            }
            err << path << ": " << (d.severity == model::Diagnostic::Severity::error ? "error" : "warning") << ": "
                << d.message << "\n";
        }
        if (model::has_errors(diagnostics)) {
            return std::nullopt;
        }
        return model::flatten(network);
    } catch (const ParseError& e) {
        err << path << ":" << e.what() << "\n";
    } catch (const Error& e) {
        err << path << ": error: " << e.what() << "\n";
    }
    return std::nullopt;
}

json config_json(const RunConfig& c) {
    return {{"model", c.model_path},
            {"bound", c.bound},
            {"method", to_string(c.method)},
            {"depth", c.depth},
            {"effort", c.effort},
            {"runs", c.runs ? json(*c.runs) : json(nullptr)},
            {"seconds", c.seconds ? json(*c.seconds) : json(nullptr)},
            {"seed", c.seed},
            {"confidence", c.confidence},
            {"clip_quantile", c.clip_quantile},
            {"workers", c.workers},
            {"output", c.output == OutputFormat::json ? "json" : "csv"}};
}

importance::ImportanceFunction build_function(const model::FlatModel& flat, const RunConfig& c) {
    switch (c.method) {
        case Method::res_time:
            return importance::ImportanceFunction::time_sensitive(flat, c.depth);
        case Method::res_notime:
            return importance::ImportanceFunction::agnostic(flat);
        case Method::cmc:
            break;
    }
    return importance::ImportanceFunction::target_only(flat);
}

bool write_file(const std::filesystem::path& path, const std::string& content, std::ostream& err) {
    std::ofstream out(path);
    out << content;
    if (!out) {
        err << path.string() << ": error: cannot write file\n";
        return false;
    }
    return true;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void write_trace(const model::FlatModel& flat, const importance::ImportanceFunction& fn, const RunConfig& c,
                 std::ostream& csv) {
    csv << "step,age,timer,location,importance\n";
    Rng rng(c.seed, std::numeric_limits<std::uint64_t>::max());
    auto s = sim::sample_initial(flat, rng);
    csv << 0 << "," << 0 << ",," << s.location << "," << fn(s) << "\n";
    sim::RunOptions options;
    options.record_crossings = false;
    options.trace = [&](const sim::TraceEvent& ev) {
        csv << ev.step << "," << std::setprecision(17) << ev.age << "," << flat.timer(ev.fired).name << ","
            << ev.location << "," << ev.importance << "\n";
    };
    sim::run(flat, std::move(s), fn, c.bound, sim::Stop::target(), rng, options);
}

std::string format_double(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

}  // namespace

std::string to_string(Method method) {
    switch (method) {
        case Method::cmc: return "cmc";
        case Method::res_notime: return "res-notime";
        case Method::res_time: return "res-time";
    }
    return "?";
}

int cmd_estimate(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.runs.has_value() == c.seconds.has_value()) {
        err << "error: exactly one of --runs and --seconds is required\n";
        return kUsage;
    }
    const auto flat = load(c.model_path, c.clip_quantile, err);
    if (!flat) {
        return kModelError;
    }
    try {
        const auto fn = build_function(*flat, c);
        if (!c.export_scg.empty()) {
            const auto index =
                fn.index() ? *fn.index() : scg::backward_expand(*flat, c.depth);
            const std::string text =
                ends_with(c.export_scg, ".dot") ? index.to_dot(*flat) : index.to_json(*flat).dump(2) + "\n";
            if (!write_file(c.export_scg, text, err)) {
                return kUsage;
            }
        }
        if (!c.trace.empty()) {
            std::ostringstream csv;
            write_trace(*flat, fn, c, csv);
            if (!write_file(c.trace, csv.str(), err)) {
                return kUsage;
            }
        }
        const res::Budget budget{c.runs, c.seconds};
        const res::Options options{c.seed, c.confidence, c.workers};
        const auto e = c.method == Method::cmc ? res::cmc(*flat, c.bound, budget, options)
                                               : res::res_estimate(*flat, fn, c.effort, c.bound, budget, options);
        const bool uses_depth = c.method == Method::res_time;
        const bool uses_effort = c.method != Method::cmc;
        if (c.output == OutputFormat::json) {
            json report = {{"method", e.method},
                           {"estimate", e.value},
                           {"half_width", e.half_width},
                           {"confidence", e.confidence},
                           {"runs", e.runs},
                           {"replications", e.replications},
                           {"wall_time_s", e.wall_time_s},
                           {"seed", e.seed},
                           {"depth", uses_depth ? json(c.depth) : json(nullptr)},
                           {"effort", uses_effort ? json(c.effort) : json(nullptr)},
                           {"config", config_json(c)}};
            if (e.diagnostic) {
                report["diagnostic"] = *e.diagnostic;
            }
            out << report.dump(2) << "\n";
        } else {
            out << "method,estimate,half_width,confidence,runs,replications,wall_time_s,seed,depth,effort\n"
                << e.method << "," << format_double(e.value) << "," << format_double(e.half_width) << ","
                << e.confidence << "," << e.runs << "," << e.replications << "," << e.wall_time_s << "," << e.seed
                << "," << (uses_depth ? std::to_string(c.depth) : "") << ","
                << (uses_effort ? std::to_string(c.effort) : "") << "\n";
        }
        if (e.diagnostic) {
            err << "diagnostic: " << *e.diagnostic << "\n";
            return kBudgetDiagnostic;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kModelError;
    }
    return kOk;
}

int cmd_analyze(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto flat = load(c.model_path, c.clip_quantile, err);
    if (!flat) {
        return kModelError;
    }
    try {
        namespace fs = std::filesystem;
        const fs::path dir = c.export_scg.empty() ? fs::path("analysis") : fs::path(c.export_scg);
        fs::create_directories(dir);

        const auto agnostic = importance::ImportanceFunction::agnostic(*flat);
        const auto timed = importance::ImportanceFunction::time_sensitive(*flat, c.depth);
        const auto& index = *timed.index();
        const auto counts = index.class_counts();

        std::ostringstream classes_csv;
        classes_csv << "location,label,target,active_timers,agnostic_distance,agnostic_importance,classes\n";
        for (model::LocationId l = 0; l < flat->num_locations(); ++l) {
            std::string timers;
            for (auto t : flat->location(l).active) {
                timers += (timers.empty() ? "" : " ") + flat->timer(t).name;
            }
            sim::SimState probe;
            probe.location = l;
            probe.tau.assign(flat->num_timers(), sim::SimState::inactive());
            classes_csv << l << ",\"" << flat->location_label(l) << "\"," << (flat->is_target(l) ? 1 : 0) << ",\""
                        << timers << "\"," << agnostic.location_distance()[l] << "," << agnostic(probe) << ","
                        << counts[l] << "\n";
        }

        // Importance of every state visited by sample paths, per location.
        std::map<std::pair<model::LocationId, int>, std::uint64_t> histogram;
        const std::uint64_t paths = c.runs.value_or(1000);
        for (std::uint64_t i = 0; i < paths; ++i) {
            Rng rng(c.seed, i);
            auto s = sim::sample_initial(*flat, rng);
            ++histogram[{s.location, timed(s)}];
            sim::RunOptions options;
            options.record_crossings = false;
            options.trace = [&](const sim::TraceEvent& ev) { ++histogram[{ev.location, ev.importance}]; };
            sim::run(*flat, std::move(s), timed, c.bound, sim::Stop::target(), rng, options);
        }
        std::ostringstream hist_csv;
        hist_csv << "location,importance,count\n";
        for (const auto& [key, count] : histogram) {
            hist_csv << key.first << "," << key.second << "," << count << "\n";
        }

        const bool ok = write_file(dir / "locations.dot", flat->to_dot(), err) &&
                        write_file(dir / "locations.json", flat->to_json().dump(2) + "\n", err) &&
                        write_file(dir / "scg.dot", index.to_dot(*flat), err) &&
                        write_file(dir / "scg.json", index.to_json(*flat).dump(2) + "\n", err) &&
                        write_file(dir / "classes.csv", classes_csv.str(), err) &&
                        write_file(dir / "importance_histogram.csv", hist_csv.str(), err);
        if (!ok) {
            return kUsage;
        }
        std::vector<std::size_t> per_omega(index.d_cap(), 0);
        for (const auto& sc : index.classes()) {
            ++per_omega[sc.omega];
        }
        json summary = {{"locations", flat->num_locations()},
                        {"edges", flat->edges().size()},
                        {"timers", flat->num_timers()},
                        {"depth", c.depth},
                        {"classes", index.classes().size()},
                        {"classes_per_omega", per_omega},
                        {"agnostic_max_importance", agnostic.max_importance()},
                        {"directory", dir.string()}};
        out << summary.dump(2) << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kModelError;
    }
    return kOk;
}

int cmd_validate(const std::string& model_path, double clip_quantile, std::ostream& out, std::ostream& err) {
    const auto flat = load(model_path, clip_quantile, err, true);
    if (!flat) {
        return kModelError;
    }
    std::size_t targets = 0;
    for (model::LocationId l = 0; l < flat->num_locations(); ++l) {
        targets += flat->is_target(l) ? 1 : 0;
    }
    out << "OK: " << flat->num_locations() << " locations (" << targets << " target), " << flat->edges().size()
        << " edges, " << flat->num_timers() << " timers\n";
    return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Time-bounded reachability estimation for repairable dynamic fault trees"};
    app.name("timesplit");
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value file; command-line flags take precedence");

    RunConfig c;
    const std::map<std::string, Method> methods{
        {"cmc", Method::cmc}, {"res-notime", Method::res_notime}, {"res-time", Method::res_time}};
    const std::map<std::string, OutputFormat> formats{{"json", OutputFormat::json}, {"csv", OutputFormat::csv}};

    app.add_option("--model", c.model_path, "Kepler .dft file");
    app.add_option("--bound", c.bound, "time bound of the reachability property")->check(CLI::PositiveNumber);
    app.add_option("--method", c.method, "cmc | res-notime | res-time")
        ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case));
    app.add_option("--depth", c.depth, "backward expansion depth k")->capture_default_str();
    app.add_option("--effort", c.effort, "Fixed Effort runs per level")
        ->capture_default_str()
        ->check(CLI::Range(1U, 1U << 30));
    auto* runs = app.add_option("--runs", c.runs, "budget: simulated paths")->check(CLI::PositiveNumber);
    app.add_option("--seconds", c.seconds, "budget: wall-clock seconds")->check(CLI::PositiveNumber)->excludes(runs);
    app.add_option("--seed", c.seed, "RNG seed")->envname("TIMESPLIT_SEED")->capture_default_str();
    app.add_option("--confidence", c.confidence, "confidence level 1-delta")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--clip-quantile", c.clip_quantile, "tail mass cut from exponential supports")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--workers", c.workers, "worker threads (0: all cores)")->capture_default_str();
    app.add_option("--output", c.output, "json | csv")->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    app.add_option("--export-scg", c.export_scg, "estimate: SCG file (.dot or .json); analyze: output directory");
    app.add_option("--trace", c.trace, "CSV trace of one sample path");

    auto* estimate = app.add_subcommand("estimate", "estimate the reachability probability")->fallthrough();
    auto* analyze = app.add_subcommand("analyze", "write location graph, state-class graph and importance data")
                        ->fallthrough();
    auto* validate = app.add_subcommand("validate", "check a model and print its size")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }
    if (c.model_path.empty()) {
        err << "error: --model is required\n";
        return kUsage;
    }
    if (validate->parsed()) {
        return cmd_validate(c.model_path, c.clip_quantile, out, err);
    }
    if (app.count("--bound") == 0) {
        err << "error: --bound is required\n";
        return kUsage;
    }
    if (estimate->parsed()) {
        return cmd_estimate(c, out, err);
    }
    if (analyze->parsed()) {
        return cmd_analyze(c, out, err);
    }
    return kUsage;
}

}  // namespace timesplit::cli
