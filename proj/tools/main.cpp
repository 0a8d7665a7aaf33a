#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "striate/experiments.hpp"
#include "striate/holder_norms.hpp"

using namespace striate;

namespace {

// named closed-form checks; each prints key,value lines and returns false on a miss
bool oracle(const std::string& name) {
    auto line = [](const std::string& k, double v) { std::cout << k << "," << csv_line({v}) << "\n"; };
    if (name == "radial") {
        RadialProfile p = RadialProfile::patch(1.0);
        Vec2 u1 = radial_u(p, {0.5, 0}), u2 = radial_u(p, {2, 0});
        line("u_y(0.5,0)", u1.y);
        line("u_y(2,0)", u2.y);
        return std::abs(u1.y - 0.25) < 1e-12 && std::abs(u2.y - 0.25) < 1e-12;
    }
    if (name == "shear") {
        ShearProfile sp = ShearProfile::rough(-0.5, 0.5, 64, 7);
        double worst = 0;
        for (int k = 0; k <= 200; ++k) {
            ShearFields f = shear_fields(sp, {0.3, -0.6 + 0.006 * k});
            worst = std::max(worst, max_abs(f.gradu - f.omega * f.A));
        }
        line("max|gradu-omegaA|", worst);
        return worst <= 1e-12;
    }
    if (name == "patch-velocity") {
        Grid2D g = Grid2D::centered(128, 1.25);
        ScalarField w = cell_average(g, [](Vec2 x) { return norm(x) < 1 ? 1.0 : 0.0; });
        Vec2 u = reference_velocity(w, {2, 0});
        line("u_y(2,0)", u.y);
        return std::abs(u.y - 0.25) <= 0.002 * 0.25;
    }
    if (name == "gronwall") {
        std::vector<double> t, f, g, h;
        for (int k = 0; k <= 1000; ++k) {
            t.push_back(1e-3 * k);
            f.push_back(std::exp(2e-3 * k));
            g.push_back(2);
            h.push_back(1);
        }
        auto r = gronwall_check(t, f, g, h, GronwallDirection::forward);
        line("hypothesis_violation", r.worst_hypothesis);
        line("conclusion_violation", r.worst_conclusion);
        return r.hypothesis && r.conclusion;
    }
    throw ConfigError("unknown oracle " + name + " (radial, shear, patch-velocity, gronwall)");
}

int body(int argc, char** argv) {
    CLI::App app{"striated regularity experiments"};
    app.require_subcommand(1);

    std::string config_path, name, snap_path, csv_path, column;
    int dim = 2;
    std::uint64_t trials = 100000, seed = 1;
    double alpha = 0.5;

    auto* run_cmd = app.add_subcommand("run", "advance a configured flow and print its diagnostics CSV");
    run_cmd->add_option("config", config_path)->required();
    auto* oracle_cmd = app.add_subcommand("oracle", "evaluate a named closed-form check");
    oracle_cmd->add_option("name", name)->required();
    auto* fuzz_cmd = app.add_subcommand("lemma-fuzz", "random instances of the matrix inequality");
    fuzz_cmd->add_option("--dim", dim)->check(CLI::IsMember({2, 3}));
    fuzz_cmd->add_option("--trials", trials);
    fuzz_cmd->add_option("--seed", seed);
    auto* eq_cmd = app.add_subcommand("equivalence", "both sides of the regularity equivalence");
    eq_cmd->add_option("config", config_path)->required();
    auto* norms_cmd = app.add_subcommand("norms", "Holder report of a snapshot");
    norms_cmd->add_option("snapshot", snap_path)->required();
    norms_cmd->add_option("--alpha", alpha);
    auto* plot_cmd = app.add_subcommand("plotdata", "t,value pairs of one CSV column");
    plot_cmd->add_option("csv", csv_path)->required();
    plot_cmd->add_option("--column", column)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (*run_cmd) {
        RunConfig c = load_config(config_path);
        std::cout << to_csv(run(c).rows);
    } else if (*oracle_cmd) {
        if (!oracle(name)) throw PropertyViolation("oracle " + name + " failed");
    } else if (*fuzz_cmd) {
        LemmaFuzzReport r = lemma_fuzz(dim, trials, seed);
        std::cout << "dim,trials,violations,degenerate,literal_violations,worst_ratio,min_slack\n"
                  << dim << "," << r.fuzz.trials << "," << r.fuzz.violations << "," << r.fuzz.degenerate << ","
                  << r.fuzz.literal_violations << "," << csv_line({r.fuzz.worst_ratio, r.min_slack}) << "\n";
    } else if (*eq_cmd) {
        std::cout << to_csv(equivalence_report(load_config(config_path)));
    } else if (*norms_cmd) {
        if (!(alpha > 0 && alpha < 1)) throw ConfigError("alpha must lie in (0, 1)");
        Snapshot s = read_snapshot(snap_path);
        HolderReport r;
        if (s.ncomp == 1) {
            ScalarField f(s.grid);
            f.v = s.data;
            r = holder_report(f, alpha);
        } else if (s.ncomp == 2) {
            VectorField f(s.grid);
            for (std::size_t k = 0; k < f.size(); ++k) f[k] = {s.data[2 * k], s.data[2 * k + 1]};
            r = holder_report(f, alpha);
        } else if (s.ncomp == 4) {
            MatrixField f(s.grid);
            for (std::size_t k = 0; k < f.size(); ++k)
                f[k] = {s.data[4 * k], s.data[4 * k + 1], s.data[4 * k + 2], s.data[4 * k + 3]};
            r = holder_report(f, alpha);
        } else {
            throw ConfigError("snapshot has an unsupported component count");
        }
        std::cout << HolderReport::csv_header() << "\n" << r.csv_row() << "\n";
    } else if (*plot_cmd) {
        std::ifstream in(csv_path);
        if (!in) throw ConfigError("cannot read " + csv_path);
        std::string head, line;
        std::getline(in, head);
        std::vector<std::string> cols;
        std::stringstream hs(head);
        for (std::string c; std::getline(hs, c, ',');) cols.push_back(c);
        long pick = -1;
        for (std::size_t k = 0; k < cols.size(); ++k)
            if (cols[k] == column || cols[k].substr(0, cols[k].find('[')) == column) pick = long(k);
        if (pick < 0) throw ConfigError("no column " + column + " in " + csv_path);
        while (std::getline(in, line)) {
            std::vector<std::string> f;
            std::stringstream ls(line);
            for (std::string c; std::getline(ls, c, ',');) f.push_back(c);
            if (f.size() != cols.size()) throw ConfigError("ragged row in " + csv_path);
            std::cout << f[0] << "," << f[std::size_t(pick)] << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return body(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalAbort& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return 3;
    } catch (const PropertyViolation& e) {
        std::cerr << "property violation: " << e.what() << "\n";
        return 4;
    }
}
