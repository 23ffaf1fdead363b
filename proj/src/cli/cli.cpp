#include "prony/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "json_io.hpp"
#include "prony/errors.hpp"
#include "svg.hpp"

namespace prony::cli {

namespace {

struct Options {
    std::string input;
    std::string output;
    std::string config_path;
    std::string plot_path;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> tolerances;
    bool timing = false;
    Index grid = 64;
};

std::shared_ptr<spdlog::logger> logger() {
    static const auto log = [] {
        auto l = std::make_shared<spdlog::logger>("prony", std::make_shared<spdlog::sinks::stderr_sink_mt>());
        l->set_pattern("[%l] %v");
        const char* env = std::getenv("PRONY_LOG");
        l->set_level(env != nullptr ? spdlog::level::from_str(env) : spdlog::level::warn);
        return l;
    }();
    return log;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-")
        out << text;
    else
        write_text(path, text);
}

Problem load_problem(const Options& opt, bool need_config) {
    const std::string text = read_text(opt.input);
    Problem p = parse_problem(parse_document(text, opt.input), need_config);
    if (!opt.config_path.empty()) {
        const Json overrides = parse_document(read_text(opt.config_path), opt.config_path);
        apply_config_overrides(p.config, overrides, opt.config_path);
    }
    for (const auto& t : opt.tolerances) apply_tolerance_override(p.config, t);
    if (need_config) {
        try {
            p.config.validate();
        } catch (const ContractViolation& e) {
            throw InputError("/config", e.what());
        }
    }
    if (opt.seed) p.seed = *opt.seed;
    return p;
}

Index model_size(const GroundTruth& truth) {
    return std::visit(
        [](const auto& t) -> Index {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, ConfluentTruth>)
                return static_cast<Index>(t.modes.size());
            else
                return static_cast<Index>(t.model.modes.size());
        },
        truth);
}

int cmd_synth(const Options& opt, std::ostream& out) {
    const Problem p = load_problem(opt, true);
    if (!p.truth) throw InputError("/", "missing required field \"truth\"");
    const Index L = p.L.value_or(p.config.required_L());
    if (L < p.config.required_L())
        throw InputError("/L", "L = " + std::to_string(L) + " is below 2*kappa*M - 1 = " +
                                   std::to_string(p.config.required_L()));
    if (model_size(*p.truth) > p.config.kappa)
        throw InputError("/truth/modes", "truth has " + std::to_string(model_size(*p.truth)) +
                                             " modes, more than kappa = " + std::to_string(p.config.kappa));
    logger()->info("synthesizing {} measurements, L = {}", kind_name(p.kind), L);
    const MeasurementRecord rec = synthesize({*p.truth, L, p.noise_sigma, p.seed});

    Json doc = p.doc;
    doc["L"] = L;
    if (opt.seed) doc["seed"] = *opt.seed;
    doc["measurements"] = measurements_to_json(rec);
    emit(doc.dump(2) + "\n", opt.output, out);
    return Clean;
}

InstanceDescriptor<Frequency> frequency_instance(const Problem& p) {
    if (p.kind == InstanceKind::Confluent) return confluent_instance(std::get<ConfluentSetup>(p.setup).D);
    return classic_instance(std::get<RealShiftCombination>(p.setup));
}

void require_valid_symbol(const SymbolValidation& rep, const std::string& kind) {
    if (!rep.passed())
        throw InputError("/setup", "the symbol of this " + kind +
                                       " setup fails validation (not injective, vanishing, or not invertible)");
}

template <class Point>
std::vector<PlotPoint> plot_points(const SparseSignalModel<Point>& model) {
    std::vector<PlotPoint> pts;
    for (const auto& m : model.modes) {
        if constexpr (std::is_same_v<Point, TFShift>)
            pts.push_back({m.gamma.t, m.gamma.nu});
        else if constexpr (std::is_same_v<Point, cplx>)
            pts.push_back({m.gamma.real(), m.gamma.imag()});
        else
            pts.push_back({m.gamma, m.coeffs.norm()});
    }
    return pts;
}

std::vector<PlotPoint> truth_points(const GroundTruth& truth) {
    return std::visit(
        [](const auto& t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, ConfluentTruth>) {
                Index D = 0;
                for (const auto& m : t.modes) D = std::max<Index>(D, m.q.size() - 1);
                return plot_points(to_signal_model(t.modes, D));
            } else {
                return plot_points(t.model);
            }
        },
        truth);
}

template <class Point>
Json report(const Problem& p, const RecoveryResult<Point>& res, const std::optional<double>& elapsed_ms) {
    const auto& ann = res.annihilator;
    Json coeffs = Json::array();
    for (const cplx c : ann.poly.coeffs()) coeffs.push_back(complex_to_json(c));
    Json roots = Json::array();
    for (const cplx z : ann.r_min) roots.push_back(complex_to_json(z));
    Json spurious = Json::array();
    for (const cplx z : res.spurious_roots) spurious.push_back(complex_to_json(z));

    Json r;
    r["kind"] = "report";
    r["status"] = res.clean() ? "clean" : "warnings";
    r["instance"] = kind_name(p.kind);
    r["config"] = config_to_json(p.config);
    r["model"] = model_to_json(res.model);
    r["annihilator"] = Json{{"coefficients", std::move(coeffs)},
                            {"roots", std::move(roots)},
                            {"multiplicities", ann.multiplicities},
                            {"hankel_rank", ann.hankel_rank},
                            {"rank_saturated", ann.rank_saturated}};
    r["residuals"] = Json{{"annihilation", ann.annihilation_residual},
                          {"coefficient", res.fit.residual},
                          {"coefficient_relative", res.fit.relative_residual}};
    r["diagnostics"] = Json{{"warnings", res.warnings},
                            {"spurious_roots", std::move(spurious)},
                            {"coefficient_rank", res.fit.rank},
                            {"unknowns", res.fit.unknowns},
                            {"non_unique", res.fit.non_unique}};
    if (elapsed_ms) r["timing"] = Json{{"recover_ms", *elapsed_ms}};
    return r;
}

template <class Point>
int finish_recovery(const Options& opt, const Problem& p, const InstanceDescriptor<Point>& inst, std::ostream& out) {
    const auto& meas = *p.measurements;
    logger()->info("recovering {} instance: L = {}, S = {}, kappa = {}, M = {}", kind_name(p.kind), meas.L(), meas.S(),
                   p.config.kappa, p.config.M);
    const auto start = std::chrono::steady_clock::now();
    const auto res = run_recovery(meas, inst, p.config, RootPolicy::Lenient);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    for (const auto& w : res.warnings) logger()->warn("{}", w);

    std::optional<double> elapsed;
    if (opt.timing) elapsed = ms;
    emit(report(p, res, elapsed).dump(2) + "\n", opt.output, out);

    if (!opt.plot_path.empty()) {
        std::vector<PlotPoint> truth;
        if (p.truth) truth = truth_points(*p.truth);
        std::string xl = "gamma", yl = "|coefficients|";
        if (p.kind == InstanceKind::Channel) xl = "t", yl = "nu";
        if (p.kind == InstanceKind::Dynamical) xl = "Re lambda", yl = "Im lambda";
        write_text(opt.plot_path, scatter_svg(truth, plot_points(res.model), xl, yl));
    }
    return res.clean() ? Clean : Warnings;
}

int cmd_recover(const Options& opt, std::ostream& out) {
    const Problem p = load_problem(opt, true);
    if (!p.measurements) throw InputError("/", "missing required field \"measurements\"");
    switch (p.kind) {
        case InstanceKind::Classic: {
            const auto& shift = std::get<RealShiftCombination>(p.setup);
            const auto inst = classic_instance(shift);
            if (!shift.is_unit_translation()) require_valid_symbol(validate_symbol(inst, uniform_frequency_grid(256)), "classic");
            return finish_recovery(opt, p, inst, out);
        }
        case InstanceKind::Confluent: return finish_recovery(opt, p, frequency_instance(p), out);
        case InstanceKind::Dynamical: {
            const auto& prob = std::get<DynamicalProblem>(p.setup);
            const auto inst = dynamical_instance(prob);
            require_valid_symbol(validate_symbol(inst, prob.basis.spectrum()), "dynamical");
            return finish_recovery(opt, p, inst, out);
        }
        case InstanceKind::Channel: {
            const auto& setup = std::get<ChannelProbeSetup>(p.setup);
            const auto inst = channel_instance(setup);
            if (!setup.is_standard()) require_valid_symbol(validate_symbol(inst, uniform_tf_grid(32)), "channel");
            return finish_recovery(opt, p, inst, out);
        }
    }
    return InputFailure;
}

int cmd_validate(const Options& opt, std::ostream& out) {
    const Problem p = load_problem(opt, false);
    SymbolValidation rep;
    std::size_t grid_size = 0;
    switch (p.kind) {
        case InstanceKind::Classic:
        case InstanceKind::Confluent: {
            const auto grid = uniform_frequency_grid(opt.grid);
            grid_size = grid.size();
            rep = validate_symbol(frequency_instance(p), grid);
            break;
        }
        case InstanceKind::Dynamical: {
            const auto& prob = std::get<DynamicalProblem>(p.setup);
            const auto grid = prob.basis.spectrum();
            grid_size = grid.size();
            rep = validate_symbol(dynamical_instance(prob), grid);
            break;
        }
        case InstanceKind::Channel: {
            const auto grid = uniform_tf_grid(opt.grid);
            grid_size = grid.size();
            rep = validate_symbol(channel_instance(std::get<ChannelProbeSetup>(p.setup)), grid);
            break;
        }
    }
    // Infinite round-trip errors (failed inversions) are not representable in JSON.
    const auto finite_or_null = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
    Json r;
    r["kind"] = "symbol-validation";
    r["status"] = rep.passed() ? "pass" : "fail";
    r["instance"] = kind_name(p.kind);
    r["grid_points"] = grid_size;
    r["min_pairwise_separation"] = finite_or_null(rep.min_pairwise_separation);
    r["min_modulus"] = finite_or_null(rep.min_modulus);
    r["max_round_trip_error"] = finite_or_null(rep.max_round_trip_error);
    r["injective"] = rep.injective;
    r["nonvanishing"] = rep.nonvanishing;
    r["round_trip_ok"] = rep.round_trip_ok;
    emit(r.dump(2) + "\n", opt.output, out);
    return rep.passed() ? Clean : Warnings;
}

using Command = int (*)(const Options&, std::ostream&);

/// Runs one command, mapping failures onto the exit-code contract.
int guarded(Command cmd, const Options& opt, std::ostream& out, std::ostream& err) {
    try {
        return cmd(opt, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return IoFailure;
    } catch (const InputError& e) {
        // Field paths are relative to the input; positions and flags already name their source.
        err << "error: ";
        if (e.where().starts_with("/")) err << opt.input << ": ";
        err << e.what() << "\n";
        return InputFailure;
    } catch (const InsufficientMeasurements& e) {
        err << "error: " << opt.input << ": /measurements: " << e.what() << "\n";
        return InputFailure;
    } catch (const SymbolNotInjective& e) {
        err << "error: " << opt.input << ": /setup: " << e.what() << "\n";
        return InputFailure;
    } catch (const ContractViolation& e) {
        err << "error: " << opt.input << ": " << e.what() << "\n";
        return InputFailure;
    }
}

std::string output_name(const std::string& input, const std::string& command) {
    const std::string stem = std::filesystem::path(input).stem().string();
    if (command == "synth") return stem + ".measurements.json";
    if (command == "recover") return stem + ".report.json";
    return stem + ".symbol.json";
}

Command command_for(const std::string& name) {
    if (name == "synth") return cmd_synth;
    if (name == "recover") return cmd_recover;
    return cmd_validate;
}

int cmd_batch(const Options& base, const std::vector<std::string>& inputs, const std::string& command,
              const std::string& out_dir, std::ostream& out, std::ostream& err) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        err << "error: cannot create " << out_dir << ": " << ec.message() << "\n";
        return IoFailure;
    }
    struct Outcome {
        int code = Clean;
        std::string messages;
        std::string output;
    };
    const Command cmd = command_for(command);
    std::vector<std::future<Outcome>> jobs;
    for (const auto& input : inputs) {
        Options opt = base;
        opt.input = input;
        opt.output = (std::filesystem::path(out_dir) / output_name(input, command)).string();
        opt.plot_path.clear();
        jobs.push_back(std::async(std::launch::async, [cmd, opt] {
            Outcome o;
            std::ostringstream sink, msgs;
            o.code = guarded(cmd, opt, sink, msgs);
            o.messages = msgs.str();
            o.output = opt.output;
            return o;
        }));
    }
    Json results = Json::array();
    int worst = Clean;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const Outcome o = jobs[i].get();
        err << o.messages;
        worst = std::max(worst, o.code);
        results.push_back(Json{{"input", inputs[i]}, {"output", o.output}, {"exit_code", o.code}});
    }
    Json summary{{"kind", "batch"}, {"command", command}, {"results", std::move(results)}};
    try {
        emit(summary.dump(2) + "\n", base.output, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return IoFailure;
    }
    return worst;
}

void add_common(CLI::App* sub, Options& opt, bool config_options) {
    sub->add_option("-o,--output", opt.output, "Output path (default: standard output)");
    if (config_options) {
        sub->add_option("--config", opt.config_path, "JSON file with recovery configuration overrides");
        sub->add_option("--tolerance", opt.tolerances, "Tolerance override key=value (repeatable)");
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generalized Prony spectral recovery", "prony"};
    app.require_subcommand(1);
    Options opt;
    std::vector<std::string> batch_inputs;
    std::string batch_command = "recover";
    std::string batch_dir;
    std::uint64_t seed = 0;

    auto* synth = app.add_subcommand("synth", "Synthesize measurements from a problem file with ground truth");
    synth->add_option("problem", opt.input, "Problem file")->required();
    add_common(synth, opt, true);
    auto* seed_opt = synth->add_option("--seed", seed, "Noise seed (overrides the file)");

    auto* recover = app.add_subcommand("recover", "Recover the sparse model from a measurement file");
    recover->add_option("measurements", opt.input, "Measurement file")->required();
    add_common(recover, opt, true);
    recover->add_option("--plot", opt.plot_path, "Write an SVG scatter of recovered and true spectral points");
    recover->add_flag("--timing", opt.timing, "Add wall-clock timing to the report");

    auto* validate = app.add_subcommand("validate-symbol", "Check injectivity and invertibility of the symbol");
    validate->add_option("problem", opt.input, "Problem file")->required();
    add_common(validate, opt, false);
    validate->add_option("--grid", opt.grid, "Grid resolution per axis")->check(CLI::Range(2, 4096));

    auto* batch = app.add_subcommand("batch", "Run one command over many files concurrently");
    batch->add_option("inputs", batch_inputs, "Input files")->required();
    batch->add_option("--command", batch_command, "synth, recover or validate-symbol")
        ->check(CLI::IsMember({"synth", "recover", "validate-symbol"}));
    batch->add_option("--output-dir", batch_dir, "Directory for per-file outputs")->required();
    add_common(batch, opt, true);
    batch->add_option("--seed", seed, "Noise seed for synth");
    batch->add_flag("--timing", opt.timing, "Add wall-clock timing to reports");

    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Clean;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Clean;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return InputFailure;
    }
    if (seed_opt->count() > 0 || batch->get_option("--seed")->count() > 0) opt.seed = seed;
    logger();

    if (synth->parsed()) return guarded(cmd_synth, opt, out, err);
    if (recover->parsed()) return guarded(cmd_recover, opt, out, err);
    if (validate->parsed()) return guarded(cmd_validate, opt, out, err);
    return cmd_batch(opt, batch_inputs, batch_command, batch_dir, out, err);
}

}  // namespace prony::cli
