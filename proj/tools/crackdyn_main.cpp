#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "crackdyn/crackdyn.hpp"

namespace {

using namespace crackdyn;

// Owns the output stream selection: a file when --out was given, else stdout.
class OutputTarget {
  public:
    explicit OutputTarget(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw config_error(path, "cannot open output file for writing");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

  private:
    std::unique_ptr<std::ofstream> file_;
};

std::string shapes_path(const std::string& out) {
    const std::size_t dot = out.find_last_of('.');
    const std::size_t slash = out.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return out + "_shapes";
    return out.substr(0, dot) + "_shapes" + out.substr(dot);
}

int cmd_flexibility(const std::string& kind, double ratio, double height) {
    double theta = 0.0;
    if (kind == "single")
        theta = flexibility_single_sided(height, ratio);
    else if (kind == "double")
        theta = flexibility_double_sided(height, ratio);
    else
        throw config_error("--kind", "expected \"single\" or \"double\"");
    std::printf("%.12g\n", theta);
    return 0;
}

nlohmann::json model_json(const NondimModel& m) {
    return {{"crack_positions", m.crack_positions},
            {"flexibilities", m.flexibilities},
            {"beta", m.beta},
            {"c_d", m.c_d},
            {"mu", m.mu}};
}

int cmd_nondim(const std::string& config_path) {
    Config cfg = load_config(config_path);
    NondimSummary summary;
    NondimModel model = resolve_model(cfg, &summary);
    nlohmann::json out = {{"nondim", model_json(model)},
                          {"summary",
                           {{"omega0", summary.omega0},
                            {"gyration_radius", summary.gyration_radius},
                            {"beta", summary.beta},
                            {"energy_factor", summary.energy_factor}}}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

void write_shapes_csv(std::ostream& out, const ModalBasis& basis, int grid) {
    const std::size_t n = basis.size();
    std::vector<std::string> header{"x"};
    for (std::size_t k = 1; k <= n; ++k) {
        header.push_back("phi_" + std::to_string(k));
        header.push_back("dphi_" + std::to_string(k));
        header.push_back("ddphi_" + std::to_string(k));
    }
    write_csv_row(out, header);

    // Uniform grid plus a duplicated (left/right) row at every crack abscissa.
    struct Row {
        double x;
        Side side;
        int rank; // left rows sort before right rows at the same x
    };
    std::vector<Row> rows;
    for (int i = 0; i < grid; ++i)
        rows.push_back({kPi * static_cast<double>(i) / static_cast<double>(grid - 1),
                        Side::right, 1});
    for (double s : basis.model.crack_positions) {
        rows.push_back({s, Side::left, 0});
        rows.push_back({s, Side::right, 2});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.x != b.x ? a.x < b.x : a.rank < b.rank;
    });

    std::vector<std::string> cells;
    for (const Row& r : rows) {
        cells.clear();
        cells.push_back(format_double(r.x));
        for (std::size_t k = 0; k < n; ++k)
            for (int order = 0; order < 3; ++order)
                cells.push_back(format_double(evaluate(basis.pairs[k], r.x, order, r.side)));
        write_csv_row(out, cells);
    }
}

int cmd_modal(const std::string& config_path, int modes_flag, const std::string& out_path,
              int shapes_grid) {
    Config cfg = load_config(config_path);
    const int n = modes_flag > 0 ? modes_flag : cfg.modal.n_modes;
    NondimSummary summary;
    NondimModel model = resolve_model(cfg, &summary);
    ModalBasis basis = build_basis(model, n, cfg.modal.scan);
    const bool physical = cfg.physical.has_value();

    OutputTarget out(out_path);
    write_csv_row(out.stream(), {"k", "lambda", "lambda4", "omega_physical"});
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const double lambda = basis.lambda(k);
        write_csv_row(out.stream(),
                      {std::to_string(k + 1), format_double(lambda),
                       format_double(basis.lambda4(k)),
                       physical ? format_double(lambda * lambda * summary.omega0) : ""});
    }

    if (shapes_grid > 0) {
        if (shapes_grid < 2) throw config_error("--shapes", "grid needs at least 2 points");
        if (out_path.empty()) throw config_error("--shapes", "requires --out");
        OutputTarget shapes(shapes_path(out_path));
        write_shapes_csv(shapes.stream(), basis, shapes_grid);
    }
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_path) {
    Config cfg = load_config(config_path);
    if (!cfg.simulation) throw config_error("$.simulation", "missing required key");
    const SimulationSettings& sim = *cfg.simulation;
    const int n = cfg.modal.n_modes;

    NondimModel model = resolve_model(cfg);
    ModalBasis basis = build_basis(model, n, cfg.modal.scan);

    SimConfig sc;
    sc.model_kind = sim.model_kind;
    sc.n_modes = n;
    sc.t_final = sim.t_final;
    sc.dt = sim.dt;
    sc.record_every = sim.record_every;
    sc.initial = State::zero(n);
    if (sim.initial_modal.size() > static_cast<std::size_t>(n))
        throw config_error("$.simulation.initial.modal", "more entries than modes");
    for (std::size_t k = 0; k < sim.initial_modal.size(); ++k)
        sc.initial.c[static_cast<Eigen::Index>(k)] = sim.initial_modal[k];

    LoadModel load = sim.load;
    if (load.kind == LoadKind::modal) {
        if (load.modal_amplitudes.size() > n)
            throw config_error("$.simulation.load.modal", "more entries than modes");
        Eigen::VectorXd padded = Eigen::VectorXd::Zero(n);
        padded.head(load.modal_amplitudes.size()) = load.modal_amplitudes;
        load.modal_amplitudes = padded;
    }
    ProjectedLoad pl = project_load(basis, load);
    Trajectory traj = simulate(basis, model, pl, sc);

    OutputTarget out(out_path);
    std::vector<std::string> header{"t"};
    for (int k = 1; k <= n; ++k) header.push_back("c_" + std::to_string(k));
    for (int k = 1; k <= n; ++k) header.push_back("v_" + std::to_string(k));
    header.insert(header.end(), {"T_k", "U_b", "U_a", "E", "balance_residual"});
    write_csv_row(out.stream(), header);

    std::vector<std::string> cells;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        cells.clear();
        cells.push_back(format_double(traj.times[i]));
        const State& s = traj.states[i];
        for (int k = 0; k < n; ++k) cells.push_back(format_double(s.c[k]));
        for (int k = 0; k < n; ++k) cells.push_back(format_double(s.v[k]));
        const EnergyReport& e = traj.energies[i];
        cells.push_back(format_double(e.kinetic));
        cells.push_back(format_double(e.bending));
        cells.push_back(format_double(e.axial));
        cells.push_back(format_double(e.total));
        cells.push_back(format_double(traj.balance_residuals[i]));
        write_csv_row(out.stream(), cells);
    }
    return 0;
}

int cmd_verify(const std::string& config_path, int elements, int modes, double tol) {
    Config cfg = load_config(config_path);
    NondimModel model = resolve_model(cfg);
    std::vector<double> tm = find_eigenvalues(model, modes, cfg.modal.scan);

    std::vector<Eigen::VectorXd> fem(3);
    for (int i = 0; i < 3; ++i)
        fem[i] = solve_modes(assemble(model, elements << i), modes, true).lambda4;

    std::printf("%-3s %-16s %-16s %-16s %-16s %-16s %-10s %-10s %-10s %-10s\n", "k",
                "transfer_matrix", "fem_coarse", "fem_medium", "fem_fine", "fem_extrap",
                "d_coarse", "d_medium", "d_fine", "d_extrap");
    bool ok = true;
    for (int k = 0; k < modes; ++k) {
        const double ref = tm[static_cast<std::size_t>(k)];
        double lam[4], rel[4];
        for (int i = 0; i < 3; ++i) lam[i] = std::pow(fem[i][k], 0.25);
        lam[3] = std::pow(richardson4(fem[0][k], fem[1][k], fem[2][k]), 0.25);
        for (int i = 0; i < 4; ++i) {
            rel[i] = std::fabs(lam[i] - ref) / ref;
            if (!(rel[i] <= tol)) ok = false;
        }
        std::printf("%-3d %-16.10g %-16.10g %-16.10g %-16.10g %-16.10g %-10.3g %-10.3g "
                    "%-10.3g %-10.3g\n",
                    k + 1, ref, lam[0], lam[1], lam[2], lam[3], rel[0], rel[1], rel[2], rel[3]);
    }
    std::printf("verification %s (meshes %d/%d/%d elements per unit length, tol %.3g)\n",
                ok ? "PASS" : "FAIL", elements, elements * 2, elements * 4, tol);
    return ok ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cracked beam and shallow arch dynamics"};
    app.require_subcommand(1);

    auto* flex = app.add_subcommand("flexibility", "crack flexibility from depth ratio");
    std::string flex_kind;
    double flex_ratio = 0.0, flex_height = 0.0;
    flex->add_option("--kind", flex_kind, "crack kind: single or double")->required();
    flex->add_option("--ratio", flex_ratio, "depth ratio a/H in [0, 1)")->required();
    flex->add_option("--height", flex_height, "section height H")->required();

    auto* nondim = app.add_subcommand("nondim", "print the non-dimensional model as JSON");
    std::string nondim_config;
    nondim->add_option("--config", nondim_config, "JSON config file")->required();

    auto* modal = app.add_subcommand("modal", "natural frequencies and mode shapes");
    std::string modal_config, modal_out;
    int modal_modes = 0, modal_shapes = 0;
    modal->add_option("--config", modal_config, "JSON config file")->required();
    modal->add_option("--modes", modal_modes, "number of modes (overrides config)");
    modal->add_option("--out", modal_out, "output CSV path (default stdout)");
    modal->add_option("--shapes", modal_shapes, "also write mode shapes on an N-point grid");

    auto* sim = app.add_subcommand("simulate", "integrate the modal equations of motion");
    std::string sim_config, sim_out;
    sim->add_option("--config", sim_config, "JSON config file")->required();
    sim->add_option("--out", sim_out, "output CSV path (default stdout)");

    auto* verify = app.add_subcommand("verify", "cross-check eigenvalues against the FEM oracle");
    std::string verify_config;
    int verify_elements = 32, verify_modes = 6;
    double verify_tol = 1e-5;
    verify->add_option("--config", verify_config, "JSON config file")->required();
    verify->add_option("--elements", verify_elements, "coarse mesh elements per unit length")
        ->check(CLI::PositiveNumber);
    verify->add_option("--modes", verify_modes, "number of modes to compare")
        ->check(CLI::PositiveNumber);
    verify->add_option("--tol", verify_tol, "relative tolerance on eigenvalue agreement")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (flex->parsed()) return cmd_flexibility(flex_kind, flex_ratio, flex_height);
        if (nondim->parsed()) return cmd_nondim(nondim_config);
        if (modal->parsed()) return cmd_modal(modal_config, modal_modes, modal_out, modal_shapes);
        if (sim->parsed()) return cmd_simulate(sim_config, sim_out);
        if (verify->parsed()) return cmd_verify(verify_config, verify_elements, verify_modes, verify_tol);
    } catch (const crackdyn::config_error& e) {
        std::fprintf(stderr, "crackdyn: config error: %s\n", e.what());
        return 2;
    } catch (const crackdyn::numerical_error& e) {
        std::fprintf(stderr, "crackdyn: numerical error: %s\n", e.what());
        return 3;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "crackdyn: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "crackdyn: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "crackdyn: %s\n", e.what());
        return 3;
    }
    return 0;
}
