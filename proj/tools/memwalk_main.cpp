// SPDX-License-Identifier: Apache-2.0
//
// memwalk: simulate memorised Brownian walks and compute their egocentric
// asphericity, by Monte Carlo and by the exact kernel-integral limit.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "memwalk/memwalk.hpp"

namespace {

using memwalk::Kernel;

using Cell = std::variant<std::string, double, std::uint64_t>;

struct Table {
    std::string schema;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

void write_csv(std::ostream& os, const Table& t) {
    os << "# schema " << t.schema << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            if (const auto* s = std::get_if<std::string>(&row[i])) os << csv_escape(*s);
            else if (const auto* d = std::get_if<double>(&row[i])) os << format_real(*d);
            else os << std::get<std::uint64_t>(row[i]);
        }
        os << "\n";
    }
}

void write_json(std::ostream& os, const Table& t) {
    nlohmann::json doc;
    doc["schema"] = t.schema;
    doc["rows"] = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json obj;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (const auto* s = std::get_if<std::string>(&row[i])) obj[t.columns[i]] = *s;
            else if (const auto* d = std::get_if<double>(&row[i])) obj[t.columns[i]] = *d;
            else obj[t.columns[i]] = std::get<std::uint64_t>(row[i]);
        }
        doc["rows"].push_back(std::move(obj));
    }
    os << doc.dump(2) << "\n";
}

void emit(const Table& t, const std::string& out_path, const std::string& format) {
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary);
        if (!file) throw std::invalid_argument("cannot open output file: " + out_path);
        os = &file;
    }
    if (format == "json") write_json(*os, t);
    else write_csv(*os, t);
}

struct CommonOpts {
    std::string kernel_spec;
    double c = 1000.0;
    std::uint64_t replicas = 1000;
    std::uint64_t seed = 0;
    std::string out_path;
    std::string format = "csv";
    int threads = 0;
    double rel_tol = 1e-8;
};

void add_output_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--out", o.out_path, "Output path (default: stdout)");
    cmd->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

void add_mc_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--c", o.c, "Memory rate c (expected number of memories)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--replicas", o.replicas, "Number of independent replicas")
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{100000000}))
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)")
        ->capture_default_str();
}

std::vector<double> parse_grid(const std::string& text, const char* what) {
    std::vector<double> grid;
    std::string item;
    std::stringstream ss(text);
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        grid.push_back(memwalk::detail::parse_real(item, what));
    }
    if (grid.empty()) throw CLI::ValidationError(what, "expected a comma-separated list");
    return grid;
}

Kernel family_kernel(const std::string& family, double param) {
    if (family == "uniform") return Kernel::uniform(param);
    if (family == "exponential") return Kernel::exponential(param);
    if (family == "stretched") return Kernel::stretched(param);
    if (family == "lomax") return Kernel::lomax(param);
    throw std::invalid_argument("sweep does not support family '" + family +
                                "' (it has no free parameter)");
}

int run_theory(const CommonOpts& o) {
    const Kernel kernel = Kernel::parse(o.kernel_spec);
    const memwalk::TheoryResult r = memwalk::a2_limit(kernel, o.rel_tol);
    const std::optional<double> closed = memwalk::closed_form_a2(kernel);

    Table t;
    t.schema = "memwalk.theory.v1";
    t.columns = {"kernel", "a2", "alpha_limit", "beta_limit", "tau_used",
                 "rel_change_last_doubling", "a2_closed_form"};
    t.rows.push_back({kernel.to_string(), r.a2, r.alpha_limit, r.beta_limit, r.tau_used,
                      r.rel_change_last_doubling,
                      closed ? Cell{*closed} : Cell{std::string{}}});
    emit(t, o.out_path, o.format);
    return 0;
}

int run_estimate(const CommonOpts& o, const std::string& tensors_out,
                 const std::string& stderr_method) {
    memwalk::RunConfig cfg{Kernel::parse(o.kernel_spec), o.c, o.replicas, o.seed, 0, o.threads};
    const auto tensors = memwalk::run_replica_tensors(cfg);
    const auto method = stderr_method == "jackknife" ? memwalk::StdErrorMethod::jackknife
                                                     : memwalk::StdErrorMethod::delta;
    const memwalk::AsphericityEstimate est = memwalk::asphericity_estimate(tensors, method);

    Table t;
    t.schema = "memwalk.estimate.v1";
    t.columns = {"kernel", "c", "replicas", "a2_hat", "stderr", "mean_num", "mean_den"};
    t.rows.push_back({cfg.kernel.to_string(), cfg.c, std::uint64_t{est.replicas}, est.a2_hat,
                      est.std_error, est.mean_num, est.mean_den});
    emit(t, o.out_path, o.format);

    if (!tensors_out.empty()) {
        Table tt;
        tt.schema = "memwalk.tensors.v1";
        tt.columns = {"replica", "t11", "t12", "t22", "n"};
        for (std::size_t i = 0; i < tensors.size(); ++i)
            tt.rows.push_back({std::uint64_t{i}, tensors[i].t11, tensors[i].t12, tensors[i].t22,
                               std::uint64_t{tensors[i].n_points}});
        emit(tt, tensors_out, o.format);
    }
    return 0;
}

int run_sweep(const CommonOpts& o, const std::string& family, const std::string& grid_text) {
    const std::vector<double> grid = parse_grid(grid_text, "--params");
    Table t;
    t.schema = "memwalk.sweep.v1";
    t.columns = {"family", "param", "a2_theory", "a2_hat", "stderr"};
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const Kernel kernel = family_kernel(family, grid[j]);
        const double theory = memwalk::a2_limit(kernel, o.rel_tol).a2;
        memwalk::RunConfig cfg{kernel, o.c, o.replicas, o.seed, j * o.replicas, o.threads};
        const auto est = memwalk::estimate_asphericity(cfg);
        t.rows.push_back({family, grid[j], theory, est.a2_hat, est.std_error});
    }
    emit(t, o.out_path, o.format);
    return 0;
}

int run_convergence(const CommonOpts& o, const std::string& grid_text) {
    const std::vector<double> grid = parse_grid(grid_text, "--c-grid");
    if (grid.size() < 2)
        throw CLI::ValidationError("--c-grid", "needs at least 2 values of c");
    const Kernel kernel = Kernel::parse(o.kernel_spec);
    const double theory = memwalk::a2_limit(kernel, o.rel_tol).a2;

    Table t;
    t.schema = "memwalk.convergence.v1";
    t.columns = {"kernel", "c", "a2_hat", "stderr", "a2_theory"};
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (!(grid[j] > 0.0)) throw CLI::ValidationError("--c-grid", "c values must be positive");
        memwalk::RunConfig cfg{kernel, grid[j], o.replicas, o.seed, j * o.replicas, o.threads};
        const auto est = memwalk::estimate_asphericity(cfg);
        t.rows.push_back({kernel.to_string(), grid[j], est.a2_hat, est.std_error, theory});
    }
    emit(t, o.out_path, o.format);
    return 0;
}

int run_density(const CommonOpts& o) {
    memwalk::RunConfig cfg{Kernel::parse(o.kernel_spec), o.c, o.replicas, o.seed, 0, o.threads};
    const auto sets = memwalk::run_replica_sets(cfg);

    Table t;
    t.schema = "memwalk.density.v1";
    t.columns = {"replica", "x", "y"};
    for (std::size_t i = 0; i < sets.size(); ++i) {
        if (sets[i].locations.size() < 2) {
            std::cerr << "warning: replica " << i
                      << " skipped (fewer than 2 memorised points)\n";
            continue;
        }
        for (const auto& p : memwalk::align_for_density(sets[i]))
            t.rows.push_back({std::uint64_t{i}, p.x, p.y});
    }
    emit(t, o.out_path, o.format);
    return 0;
}

int run_sample(const CommonOpts& o, std::uint64_t replica) {
    const Kernel kernel = Kernel::parse(o.kernel_spec);
    const memwalk::MemorySet set =
        memwalk::sample_memory_set(kernel, o.c, {o.seed, replica});
    if (set.truncated)
        std::cerr << "warning: replica " << replica << " truncated at the survival floor\n";

    Table t;
    t.schema = "memwalk.memoryset.v1";
    t.columns = {"t", "x", "y"};
    t.rows.push_back({0.0, 0.0, 0.0}); // the walker's current position
    for (std::size_t i = 0; i < set.times.size(); ++i)
        t.rows.push_back({set.times[i], set.locations[i].x, set.locations[i].y});
    emit(t, o.out_path, o.format);
    return 0;
}

int run_ellipse(const CommonOpts& o, double kappa) {
    memwalk::RunConfig cfg{Kernel::parse(o.kernel_spec), o.c, o.replicas, o.seed, 0, o.threads};
    const auto tensors = memwalk::run_replica_tensors(cfg);

    Table t;
    t.schema = "memwalk.ellipse.v1";
    t.columns = {"replica", "semi_major", "semi_minor", "theta"};
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        const auto e = memwalk::ellipse(tensors[i], kappa);
        t.rows.push_back({std::uint64_t{i}, e.semi_major, e.semi_minor, e.angle_theta});
    }
    emit(t, o.out_path, o.format);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"memorised-random-walk asphericity toolkit"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string family, params_text, c_grid_text;
    std::string tensors_out, stderr_method = "delta";
    double kappa = 2.0;

    auto* theory = app.add_subcommand("theory", "Exact asphericity limit for a kernel");
    theory->add_option("--kernel", o.kernel_spec, "Kernel spec, e.g. exponential:lambda=1")
        ->required();
    theory->add_option("--rel-tol", o.rel_tol, "Ladder convergence tolerance")
        ->check(CLI::Range(1e-15, 1e-3))
        ->capture_default_str();
    add_output_opts(theory, o);

    auto* estimate = app.add_subcommand("estimate", "Monte Carlo asphericity estimate");
    estimate->add_option("--kernel", o.kernel_spec, "Kernel spec")->required();
    add_mc_opts(estimate, o);
    estimate->add_option("--tensors-out", tensors_out, "Also write per-replica tensors (CSV)");
    estimate->add_option("--stderr-method", stderr_method, "Standard error method")
        ->check(CLI::IsMember({"delta", "jackknife"}))
        ->capture_default_str();
    add_output_opts(estimate, o);

    auto* sweep = app.add_subcommand("sweep", "Theory + Monte Carlo over a parameter grid");
    sweep->add_option("--family", family, "Kernel family: uniform|exponential|stretched|lomax")
        ->required();
    sweep->add_option("--params", params_text, "Comma-separated parameter grid")->required();
    sweep->add_option("--rel-tol", o.rel_tol, "Theory ladder tolerance")
        ->check(CLI::Range(1e-15, 1e-3))
        ->capture_default_str();
    add_mc_opts(sweep, o);
    add_output_opts(sweep, o);

    auto* convergence =
        app.add_subcommand("convergence", "Monte Carlo estimates over a grid of memory rates c");
    convergence->add_option("--kernel", o.kernel_spec, "Kernel spec")->required();
    convergence->add_option("--c-grid", c_grid_text, "Comma-separated c grid (>= 2 values)")
        ->required();
    convergence->add_option("--rel-tol", o.rel_tol, "Theory ladder tolerance")
        ->check(CLI::Range(1e-15, 1e-3))
        ->capture_default_str();
    add_mc_opts(convergence, o);
    add_output_opts(convergence, o);

    auto* density = app.add_subcommand(
        "density", "Aligned memory-set point clouds (major axis horizontal, CoM x >= 0)");
    density->add_option("--kernel", o.kernel_spec, "Kernel spec")->required();
    add_mc_opts(density, o);
    add_output_opts(density, o);

    std::uint64_t sample_replica = 0;
    auto* sample = app.add_subcommand("sample", "Dump one memory set as t,x,y rows");
    sample->add_option("--kernel", o.kernel_spec, "Kernel spec")->required();
    sample->add_option("--c", o.c, "Memory rate c")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sample->add_option("--seed", o.seed, "Master seed")->capture_default_str();
    sample->add_option("--replica", sample_replica, "Replica (stream) index")
        ->capture_default_str();
    add_output_opts(sample, o);

    auto* ellipse_cmd = app.add_subcommand("ellipse", "Per-replica gyration ellipses");
    ellipse_cmd->add_option("--kernel", o.kernel_spec, "Kernel spec")->required();
    ellipse_cmd->add_option("--kappa", kappa, "Ellipse scale kappa")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_mc_opts(ellipse_cmd, o);
    add_output_opts(ellipse_cmd, o);

    try {
        app.parse(argc, argv);
        if (theory->parsed()) return run_theory(o);
        if (estimate->parsed()) return run_estimate(o, tensors_out, stderr_method);
        if (sweep->parsed()) return run_sweep(o, family, params_text);
        if (convergence->parsed()) return run_convergence(o, c_grid_text);
        if (density->parsed()) return run_density(o);
        if (sample->parsed()) return run_sample(o, sample_replica);
        if (ellipse_cmd->parsed()) return run_ellipse(o, kappa);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const memwalk::TheoryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
