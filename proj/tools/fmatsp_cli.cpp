// fmatsp: labeling codecs, exact TSP solving, landscape metrics and FMA runs.

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fmatsp/fmatsp.hpp"
#include "fmatsp/io.hpp"

namespace fs = std::filesystem;
using namespace fmatsp;

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kResource = 2, kInternal = 3 };

const std::map<std::string, LabelingKind> kSchemeNames{{"natural", LabelingKind::Natural},
                                                       {"gray", LabelingKind::Gray}};

std::vector<LabelingKind> schemes_from(const std::string& name) {
    if (name == "both") return {LabelingKind::Natural, LabelingKind::Gray};
    return {parse_labeling_kind(name)};
}

struct InstanceRef {
    int builtin = 0;
    std::string file;

    void add_options(CLI::App* cmd) {
        auto* b = cmd->add_option("--builtin", builtin, "Fixed instance with N cities (5, 7, 9, 11, 13, 15)");
        auto* f = cmd->add_option("--instance", file, "Instance file (line 1: N, then 'index alpha beta' rows)");
        b->excludes(f);
    }

    bool given() const { return builtin != 0 || !file.empty(); }

    TspInstance load() const {
        if (!file.empty()) {
            std::ifstream in(file);
            if (!in) throw ValidationError("cannot open instance file '" + file + "'");
            return read_instance(in);
        }
        if (builtin == 0) throw ValidationError("give --builtin N or --instance FILE");
        return builtin_instance(builtin);
    }

    std::string describe() const { return file.empty() ? "builtin:" + std::to_string(builtin) : file; }
};

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    return out;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size() / 2;
    return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

// ---------------------------------------------------------------------------
// encode / decode

struct CodecArgs {
    std::string scheme = "gray";
    int n = 0;
    std::string text;
};

int run_encode(const CodecArgs& a) {
    const LabelingScheme scheme{parse_labeling_kind(a.scheme), a.n};
    check_city_count(a.n);
    std::cout << scheme.encode(Route::parse(a.text)).to_string() << '\n';
    return kOk;
}

int run_decode(const CodecArgs& a) {
    const LabelingScheme scheme{parse_labeling_kind(a.scheme), a.n};
    check_city_count(a.n);
    const BitString bits = BitString::from_string(a.text);
    if (bits.size() != scheme.bit_length()) {
        throw ValidationError("expected " + std::to_string(scheme.bit_length()) + " bits for " + a.scheme +
                              " labeling with N=" + std::to_string(a.n) + ", got " + std::to_string(bits.size()));
    }
    std::cout << scheme.decode(bits).to_string() << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// exact

struct ExactArgs {
    InstanceRef instance;
    bool oracle = false;
    std::string out = "exact_route.csv";
};

int run_exact(const ExactArgs& a) {
    const TspInstance inst = a.instance.load();
    const TourResult best = held_karp(inst);
    std::cout << "N " << inst.n_cities() << '\n'
              << "distance " << format_double(best.distance) << '\n'
              << "route " << best.route.to_string() << '\n';
    int code = kOk;
    if (a.oracle) {
        const TourResult check = brute_force(inst);
        const bool agree = std::abs(check.distance - best.distance) <= 1e-12 * best.distance;
        std::cout << "oracle_distance " << format_double(check.distance) << '\n'
                  << "oracle_route " << check.route.to_string() << '\n'
                  << "oracle_agrees " << (agree ? "yes" : "no") << '\n';
        if (!agree) code = kInternal;
    }
    if (!a.out.empty()) {
        auto file = open_output(a.out);
        write_route_coordinates(file, inst, best.route);
    }
    return code;
}

// ---------------------------------------------------------------------------
// metric

struct MetricArgs {
    std::vector<int> builtin;
    std::string file;
    std::string scheme = "both";
    bool exhaustive = false;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    bool strict = false;
    std::string out;
};

constexpr int kExhaustiveMaxBuiltin = 9;

int run_metric(const MetricArgs& a) {
    std::vector<std::pair<TspInstance, std::string>> instances;
    if (!a.file.empty()) {
        InstanceRef ref;
        ref.file = a.file;
        instances.emplace_back(ref.load(), a.file);
    }
    for (int n : a.builtin) instances.emplace_back(builtin_instance(n), "builtin");
    if (instances.empty()) throw ValidationError("give --builtin N[,N...] or --instance FILE");

    std::ostringstream csv;
    csv << kMetricCsvHeader << '\n';
    for (const auto& [inst, name] : instances) {
        const int n = inst.n_cities();
        MetricMode mode = MetricMode::Exhaustive();
        if (a.samples > 0) {
            mode = MetricMode::Sampled(a.samples, a.seed);
        } else if (!a.exhaustive && n > kExhaustiveMaxBuiltin) {
            mode = MetricMode::Sampled(kDefaultMetricSamples, a.seed);
        }
        for (LabelingKind kind : schemes_from(a.scheme)) {
            const auto report =
                local_solution_metric(inst, {kind, n}, mode, a.strict ? TieRule::Strict : TieRule::NonStrict);
            csv << metric_csv_row(report) << '\n';
        }
    }
    if (a.out.empty()) {
        std::cout << csv.str();
    } else {
        auto file = open_output(a.out);
        file << csv.str();
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// fma

struct FmaArgs {
    std::string config;
    std::string instance;
    std::string scheme;
    int repeat = 1;
    std::string out = "fma_out";
    ExperimentConfig overrides;
    std::optional<double> t_initial;
    std::optional<double> t_final;
};

// Flags given on the command line win over the config file.
void apply_overrides(CLI::App* cmd, const FmaArgs& a, ExperimentConfig& cfg) {
    auto given = [cmd](const char* name) { return cmd->count(name) > 0; };
    const ExperimentConfig& o = a.overrides;
    if (given("--n")) cfg.n_cities = o.n_cities;
    if (given("--n-initial")) cfg.n_initial = o.n_initial;
    if (given("--n-steps")) cfg.n_steps = o.n_steps;
    if (given("--seed")) cfg.seed = o.seed;
    if (given("--warm-start")) cfg.warm_start = o.warm_start;
    if (given("--fm-k")) cfg.fm.k = o.fm.k;
    if (given("--fm-learning-rate")) cfg.fm.learning_rate = o.fm.learning_rate;
    if (given("--fm-epochs")) cfg.fm.epochs = o.fm.epochs;
    if (given("--fm-init-scale")) cfg.fm.init_scale = o.fm.init_scale;
    if (given("--fm-batch-size")) cfg.fm.batch_size = o.fm.batch_size;
    if (given("--anneal-sweeps")) cfg.schedule.sweeps = o.schedule.sweeps;
    if (given("--anneal-restarts")) cfg.schedule.restarts = o.schedule.restarts;
    if (given("--anneal-t-initial")) cfg.schedule.t_initial = a.t_initial;
    if (given("--anneal-t-final")) cfg.schedule.t_final = a.t_final;
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

int run_fma(CLI::App* cmd, const FmaArgs& a) {
    ExperimentConfig cfg;
    std::string instance_file = a.instance;
    std::string scheme_name;
    if (!a.config.empty()) {
        nlohmann::json j = read_json_file(a.config);
        // A run manifest carries its config (and instance) under separate keys.
        if (j.is_object() && j.contains("config")) {
            if (instance_file.empty() && j.contains("instance") && j["instance"].is_string()) {
                const std::string recorded = j["instance"].get<std::string>();
                if (recorded.rfind("builtin:", 0) != 0) instance_file = recorded;
            }
            j = j["config"];
        }
        cfg = config_from_json(j);
    }
    apply_overrides(cmd, a, cfg);
    scheme_name = a.scheme.empty() ? std::string(to_string(cfg.scheme)) : a.scheme;
    const std::vector<LabelingKind> kinds = schemes_from(scheme_name);
    if (a.repeat < 1) throw ValidationError("--repeat must be at least 1");

    std::optional<TspInstance> inst;
    std::string instance_name = "builtin:" + std::to_string(cfg.n_cities);
    if (!instance_file.empty()) {
        InstanceRef ref;
        ref.file = instance_file;
        inst = ref.load();
        instance_name = instance_file;
        if (cmd->count("--n") == 0) cfg.n_cities = inst->n_cities();
    } else {
        cfg.validate();
        inst = builtin_instance(cfg.n_cities);
    }
    cfg.validate();

    const fs::path dir(a.out);
    fs::create_directories(dir);
    std::ostringstream summary;
    summary << "scheme,seed,initial_d_min,final_d_min,d_opt,ratio\n";
    std::map<std::string, std::vector<double>> ratios;

    for (LabelingKind kind : kinds) {
        for (int r = 0; r < a.repeat; ++r) {
            ExperimentConfig run = cfg;
            run.scheme = kind;
            run.seed = cfg.seed + static_cast<std::uint64_t>(r);
            const ExperimentTrace trace = fmatsp::run_fma(run, *inst);

            const std::string stem = std::string(to_string(kind)) + "_seed" + std::to_string(run.seed);
            const fs::path trace_path = dir / ("trace_" + stem + ".csv");
            const fs::path route_path = dir / ("route_" + stem + ".csv");
            const fs::path model_path = dir / ("model_" + stem + ".json");
            const fs::path manifest_path = dir / ("manifest_" + stem + ".json");
            {
                auto file = open_output(trace_path);
                write_trace_csv(file, trace);
            }
            {
                auto file = open_output(route_path);
                write_route_coordinates(file, *inst, trace.best.route);
            }
            if (trace.model) {
                auto file = open_output(model_path);
                file << model_to_json(*trace.model).dump(2) << '\n';
            }
            nlohmann::json manifest;
            manifest["tool"] = "fmatsp";
            manifest["version"] = kToolVersion;
            manifest["created"] = utc_timestamp();
            manifest["instance"] = instance_name;
            manifest["config"] = config_to_json(run);
            manifest["outputs"] = {trace_path.string(), route_path.string(), model_path.string()};
            {
                auto file = open_output(manifest_path);
                file << manifest.dump(2) << '\n';
            }

            summary << to_string(kind) << ',' << run.seed << ',' << format_double(trace.initial_d_min) << ','
                    << format_double(trace.best.distance) << ',';
            if (trace.d_opt) {
                const double ratio = final_ratio(trace);
                ratios[std::string(to_string(kind))].push_back(ratio);
                summary << format_double(*trace.d_opt) << ',' << format_double(ratio);
            } else {
                summary << ',';
            }
            summary << '\n';
        }
    }

    {
        auto file = open_output(dir / "summary.csv");
        file << summary.str();
    }
    std::cout << summary.str();
    if (!ratios.empty()) {
        std::ostringstream medians;
        medians << "scheme,runs,median_ratio\n";
        for (const auto& [name, values] : ratios) {
            medians << name << ',' << values.size() << ',' << format_double(median(values)) << '\n';
        }
        auto file = open_output(dir / "median.csv");
        file << medians.str();
        std::cout << medians.str();
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// instance export / import

struct InstanceArgs {
    int builtin = 0;
    int random = 0;
    std::uint64_t seed = 0;
    std::string in;
    std::string out;
};

void emit_instance(const TspInstance& inst, const std::string& out) {
    if (out.empty()) {
        write_instance(std::cout, inst);
    } else {
        auto file = open_output(out);
        write_instance(file, inst);
    }
}

int run_instance_export(const InstanceArgs& a) {
    if (a.builtin != 0) {
        emit_instance(builtin_instance(a.builtin), a.out);
    } else if (a.random != 0) {
        emit_instance(random_instance(a.random, a.seed), a.out);
    } else {
        throw ValidationError("give --builtin N or --random N");
    }
    return kOk;
}

int run_instance_import(const InstanceArgs& a) {
    InstanceRef ref;
    ref.file = a.in;
    const TspInstance inst = ref.load();
    std::cerr << "read " << inst.n_cities() << " cities from " << a.in << '\n';
    emit_instance(inst, a.out);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Factorization machines with annealing for the TSP, with natural and Gray labelings"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    CodecArgs enc;
    auto* encode = app.add_subcommand("encode", "Print the bit label of a route");
    encode->add_option("--scheme", enc.scheme, "Labeling: natural or gray")->check(CLI::IsMember(kSchemeNames));
    encode->add_option("--n", enc.n, "Number of cities N")->required();
    encode->add_option("route", enc.text, "Route over cities 1..N-1, e.g. 7,5,3,6,8,1,4,2")->required();

    CodecArgs dec;
    auto* decode = app.add_subcommand("decode", "Print the route a bit label decodes to");
    decode->add_option("--scheme", dec.scheme, "Labeling: natural or gray")->check(CLI::IsMember(kSchemeNames));
    decode->add_option("--n", dec.n, "Number of cities N")->required();
    decode->add_option("bits", dec.text, "Bit label, leftmost character is the highest bit")->required();

    ExactArgs ex;
    auto* exact = app.add_subcommand("exact", "Solve an instance exactly (Held-Karp, N <= 20)");
    ex.instance.add_options(exact);
    exact->add_flag("--oracle", ex.oracle, "Cross-check with brute-force enumeration (N <= 10)");
    exact->add_option("--out", ex.out, "Route coordinate file (order,city,alpha,beta); empty to skip");

    MetricArgs met;
    auto* metric = app.add_subcommand("metric", "Local-solution metric p as CSV rows");
    auto* met_builtin =
        metric->add_option("--builtin", met.builtin, "Fixed instance sizes, comma separated")->delimiter(',');
    metric->add_option("--instance", met.file, "Instance file")->excludes(met_builtin);
    metric->add_option("--scheme", met.scheme, "natural, gray or both")
        ->check(CLI::IsMember({"natural", "gray", "both"}));
    auto* met_exh = metric->add_flag("--exhaustive", met.exhaustive,
                                     "Scan all 2^l states (default for N <= 9; l must be <= 24)");
    metric
        ->add_option("--samples", met.samples,
                     "Sample this many states with replacement (0: exhaustive for N <= 9, else 100000)")
        ->excludes(met_exh);
    metric->add_option("--seed", met.seed, "Sampling seed");
    metric->add_flag("--strict", met.strict, "Count a state only if every neighbour is strictly longer");
    metric->add_option("--out", met.out, "Write CSV here instead of stdout");

    FmaArgs fa;
    const ExperimentConfig defaults;
    fa.overrides = defaults;
    auto* fma = app.add_subcommand("fma", "Run FMA experiments and write trace, route, model and manifest files");
    fma->add_option("--config", fa.config, "JSON config or run manifest; flags override its values");
    fma->add_option("--instance", fa.instance, "Instance file (default: fixed instance with --n cities)");
    fma->add_option("--scheme", fa.scheme, "natural, gray or both (default: config value, else gray)")
        ->check(CLI::IsMember({"natural", "gray", "both"}));
    fma->add_option("--n", fa.overrides.n_cities, "Number of cities N");
    fma->add_option("--n-initial", fa.overrides.n_initial, "Random initial samples N_i");
    fma->add_option("--n-steps", fa.overrides.n_steps, "FMA iterations N_s");
    fma->add_option("--seed", fa.overrides.seed, "Experiment seed (repeat r uses seed + r)");
    fma->add_flag("--warm-start", fa.overrides.warm_start, "Continue SGD from the previous step's model");
    fma->add_option("--fm-k", fa.overrides.fm.k, "FM latent dimension");
    fma->add_option("--fm-learning-rate", fa.overrides.fm.learning_rate, "SGD learning rate");
    fma->add_option("--fm-epochs", fa.overrides.fm.epochs, "SGD epochs per step");
    fma->add_option("--fm-init-scale", fa.overrides.fm.init_scale, "Std. dev. of initial latent vectors");
    fma->add_option("--fm-batch-size", fa.overrides.fm.batch_size, "SGD minibatch size");
    fma->add_option("--anneal-sweeps", fa.overrides.schedule.sweeps, "Annealing sweeps per restart");
    fma->add_option("--anneal-restarts", fa.overrides.schedule.restarts, "Annealing restarts");
    fma->add_option("--anneal-t-initial", fa.t_initial, "Initial temperature (default: 10 x median |Q|)");
    fma->add_option("--anneal-t-final", fa.t_final, "Final temperature (default: 0.01 x median |Q|)");
    fma->add_option("--repeat", fa.repeat, "Number of consecutive seeds to run");
    fma->add_option("--out", fa.out, "Output directory");

    InstanceArgs ia;
    auto* instance = app.add_subcommand("instance", "Export or import instance files");
    instance->require_subcommand(1);
    auto* exp = instance->add_subcommand("export", "Write a fixed or random instance");
    auto* exp_builtin = exp->add_option("--builtin", ia.builtin, "Fixed instance size");
    exp->add_option("--random", ia.random, "Random instance with this many cities")->excludes(exp_builtin);
    exp->add_option("--seed", ia.seed, "Seed for --random");
    exp->add_option("--out", ia.out, "Output file (default: stdout)");
    auto* imp = instance->add_subcommand("import", "Validate an instance file and rewrite it canonically");
    imp->add_option("file", ia.in, "Instance file")->required();
    imp->add_option("--out", ia.out, "Output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kValidation;
    }

    try {
        if (*encode) return run_encode(enc);
        if (*decode) return run_decode(dec);
        if (*exact) return run_exact(ex);
        if (*metric) return run_metric(met);
        if (*fma) return run_fma(fma, fa);
        if (*exp) return run_instance_export(ia);
        if (*imp) return run_instance_import(ia);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const ResourceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kResource;
    } catch (const TrainingError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInternal;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kInternal;
}
