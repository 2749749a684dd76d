// kfs: command-line runner for the preset experiments.
#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "kfs/errors.hpp"
#include "kfs/experiments.hpp"
#include "kfs/serialize.hpp"
#include "validate.hpp"

namespace {

constexpr int kExitSchema = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitOther = 1;

struct Options {
    std::string config;
    std::string preset;
    std::string out_dir;
    std::optional<long long> seed;
    std::optional<long long> trajectories;
    std::optional<int> workers;
    std::optional<int> loss_radius;
    std::optional<int> decoding_threshold;
    std::vector<std::string> params;
};

int default_workers() {
    const char* env = std::getenv("KFS_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw kfs::SchemaError("KFS_THREADS must be a positive integer");
    return static_cast<int>(v);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw kfs::IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void add_run_flags(CLI::App* app, Options& o) {
    app->add_option("--config", o.config, "JSON run configuration");
    app->add_option("--preset", o.preset, "preset name (overrides the configuration)");
    app->add_option("--out-dir", o.out_dir, "output directory");
    app->add_option("--seed", o.seed, "root RNG seed");
    app->add_option("--trajectories", o.trajectories, "number of trajectories");
    app->add_option("--workers", o.workers, "worker threads (default: KFS_THREADS or 1)");
    app->add_option("--loss-radius", o.loss_radius, "discard observables within this graph distance of a loss");
    app->add_option("--decoding-threshold", o.decoding_threshold, "maximum column-parity violations to accept");
    app->add_option("--param", o.params, "preset parameter as key=value (value parsed as JSON)");
}

kfs::RunConfig build_config(const Options& o) {
    kfs::RunConfig c;
    if (!o.config.empty()) c = kfs::parse_run_config(slurp(o.config));
    else if (o.preset.empty()) throw kfs::SchemaError("either --config or --preset is required");
    else c.workers = default_workers();
    if (!o.config.empty() && !nlohmann::json::parse(slurp(o.config)).contains("workers")) c.workers = default_workers();
    if (!o.preset.empty()) {
        kfs::preset_info(o.preset);
        c.preset = o.preset;
    }
    if (!o.out_dir.empty()) c.out_dir = o.out_dir;
    if (o.seed) {
        if (*o.seed < 0) throw kfs::SchemaError("--seed must be non-negative");
        c.seed = static_cast<std::uint64_t>(*o.seed);
    }
    if (o.trajectories) {
        if (*o.trajectories < 1) throw kfs::SchemaError("--trajectories must be at least 1");
        c.trajectories = *o.trajectories;
    }
    if (o.workers) {
        if (*o.workers < 1) throw kfs::SchemaError("--workers must be at least 1");
        c.workers = *o.workers;
    }
    if (o.loss_radius) {
        if (*o.loss_radius < 0) throw kfs::SchemaError("--loss-radius must be non-negative");
        c.postselection.loss_radius = *o.loss_radius;
    }
    if (o.decoding_threshold) {
        if (*o.decoding_threshold < 0) throw kfs::SchemaError("--decoding-threshold must be non-negative");
        c.postselection.decoding_threshold = *o.decoding_threshold;
    }
    auto params = nlohmann::json::parse(c.params);
    for (const auto& kv : o.params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw kfs::SchemaError("--param expects key=value, got '" + kv + "'");
        const std::string value = kv.substr(eq + 1);
        auto parsed = nlohmann::json::parse(value, nullptr, false);
        params[kv.substr(0, eq)] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
    }
    c.params = params.dump();
    return c;
}

int cmd_run(const Options& o) {
    const kfs::RunConfig c = build_config(o);
    kfs::PresetResult r = kfs::run_preset(c);
    if (!c.write_snapshots) r.trajectories.snapshots.clear();
    kfs::write_result(r, c.out_dir);
    kfs::write_summary_csv(std::cout, r.summary);
    return 0;
}

int cmd_sweep(const Options& o) {
    const kfs::RunConfig c = build_config(o);
    if (c.sweep.empty()) throw kfs::SchemaError("sweep needs at least one axis in the configuration");
    const kfs::SweepResult s = kfs::run_sweep(c);
    std::filesystem::create_directories(c.out_dir);
    const auto path = std::filesystem::path(c.out_dir) / "sweep.csv";
    std::ofstream out(path);
    if (!out) throw kfs::IoError("cannot write " + path.string());
    kfs::write_sweep_csv(out, s);
    kfs::write_sweep_csv(std::cout, s);
    return 0;
}

int cmd_validate(std::optional<int> workers) {
    const int w = workers.value_or(default_workers());
    const int failed = kfs::cli::run_checks(kfs::cli::invariant_checks(w), std::cout);
    return failed == 0 ? 0 : kExitInvariant;
}

int cmd_lattice_dump(int rows, int cols, const std::string& boundary, const std::string& out) {
    kfs::Boundary b;
    if (boundary == "cylinder") b = kfs::Boundary::Cylinder;
    else if (boundary == "open") b = kfs::Boundary::Open;
    else throw kfs::SchemaError("--boundary must be 'cylinder' or 'open'");
    const std::string json = kfs::lattice_to_json(kfs::build_lattice(rows, cols, b));
    if (out.empty() || out == "-") {
        std::cout << json << '\n';
        return 0;
    }
    std::ofstream f(out);
    if (!f) throw kfs::IoError("cannot write " + out);
    f << json << '\n';
    return 0;
}

int cmd_presets() {
    for (const auto& p : kfs::presets())
        std::cout << p.name << "\n  panel: " << p.panel << "\n  tolerance: " << p.tolerance
                  << "\n  default trajectories: " << p.default_trajectories << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kitaev honeycomb fermion simulator"};
    app.require_subcommand(1);

    Options run_opts, sweep_opts;
    auto* run = app.add_subcommand("run", "run one preset and write its outputs");
    add_run_flags(run, run_opts);
    auto* sweep = app.add_subcommand("sweep", "run a preset over the sweep grid of a configuration");
    add_run_flags(sweep, sweep_opts);

    std::optional<int> validate_workers;
    auto* validate = app.add_subcommand("validate", "run the invariant suite");
    validate->add_option("--workers", validate_workers, "worker threads for the determinism check");

    int rows = 4, cols = 8;
    std::string boundary = "cylinder", dump_out;
    auto* lattice = app.add_subcommand("lattice", "lattice utilities");
    lattice->require_subcommand(1);
    auto* dump = lattice->add_subcommand("dump", "print the lattice as JSON");
    dump->add_option("--rows", rows, "plaquette rows");
    dump->add_option("--cols", cols, "plaquette columns");
    dump->add_option("--boundary", boundary, "cylinder or open");
    dump->add_option("--out", dump_out, "output file (default stdout)");

    auto* list = app.add_subcommand("presets", "list presets with their target panel and tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitSchema;
    }

    try {
        if (run->parsed()) return cmd_run(run_opts);
        if (sweep->parsed()) return cmd_sweep(sweep_opts);
        if (validate->parsed()) return cmd_validate(validate_workers);
        if (dump->parsed()) return cmd_lattice_dump(rows, cols, boundary, dump_out);
        if (list->parsed()) return cmd_presets();
    } catch (const kfs::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return kExitSchema;
    } catch (const kfs::InvalidGeometry& e) {
        std::cerr << "invalid geometry: " << e.what() << '\n';
        return kExitSchema;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return kExitSchema;
    } catch (const kfs::InvariantBreach& e) {
        std::cerr << "invariant breach: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitOther;
    }
    return kExitOther;
}
