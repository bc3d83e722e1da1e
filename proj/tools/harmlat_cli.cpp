// harmlat: batch front-end for the harmonic-lattice toolkit.
//
//   harmlat spectrum    --model kg --kappa 0.5
//   harmlat groundstate --model powerlaw --alpha 3 --sign -1 --nmax 100
//   harmlat corrlength  --model kg --kappa 0.9
//   harmlat scaling     --model powerlaw --alpha 3 --sign -1
//   harmlat gmps build  --seed 7 --N 6
//   harmlat trotter compile --target kg --N 4 --t 0.5
//
// Exit codes: 0 ok, 1 usage, 2 numerical failure (error name on stderr).

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "harmlat/asymptotics.hpp"
#include "harmlat/correlations.hpp"
#include "harmlat/errors.hpp"
#include "harmlat/gmps.hpp"
#include "harmlat/lattice.hpp"
#include "harmlat/trotter.hpp"

using namespace harmlat;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelArgs {
    std::string model = "kg";
    double kappa = 0.5;
    double alpha = 3;
    double c = 0.5;
    int sign = -1;
    std::optional<double> onsite;
    int dimension = 1;
    double mass = 0;
    std::string stencil;

    void add(CLI::App* app) {
        app->add_option("--model", model, "kg | powerlaw | hypercubic | stencil")
            ->check(CLI::IsMember({"kg", "powerlaw", "hypercubic", "stencil"}));
        app->add_option("--kappa", kappa, "Klein-Gordon coupling in [-1, 1]");
        app->add_option("--alpha", alpha, "power-law exponent");
        app->add_option("--c", c, "power-law amplitude |c|");
        app->add_option("--sign", sign, "sign of the power-law amplitude")->check(CLI::IsMember({-1, 1}));
        app->add_option("--onsite", onsite, "on-site value (default: critical)");
        app->add_option("--dimension", dimension, "lattice dimension (powerlaw, hypercubic)")->check(CLI::Range(1, 3));
        app->add_option("--mass", mass, "hypercubic mass term m^2 (0: critical)");
        app->add_option("--stencil", stencil, "stencil JSON file for --model stencil");
    }

    CouplingStencil build() const;
};

json read_json(const std::string& path) {
    if (std::filesystem::is_directory(path)) throw UsageError(path + " is a directory");
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
}

CouplingStencil ModelArgs::build() const {
    if (model == "kg") {
        if (std::abs(kappa) > 1) throw OutOfRange("|kappa| must not exceed 1");
        return klein_gordon(kappa);
    }
    if (model == "powerlaw") return power_law(alpha, sign * std::abs(c), dimension, onsite);
    if (model == "hypercubic") {
        CouplingStencil s;
        s.dimension = dimension;
        s.Q.entries[Offset(static_cast<std::size_t>(dimension), 0)] = 2.0 * dimension + mass;
        s.P.entries[Offset(static_cast<std::size_t>(dimension), 0)] = 1;
        for (int a = 0; a < dimension; ++a)
            for (int d : {-1, 1}) {
                Offset n(static_cast<std::size_t>(dimension), 0);
                n[static_cast<std::size_t>(a)] = d;
                s.Q.entries[n] = -1;
            }
        return s;
    }
    if (stencil.empty()) throw UsageError("--model stencil needs --stencil FILE");
    return stencil_from_json(read_json(stencil));
}

struct Output {
    std::string dir;
    void add(CLI::App* app) { app->add_option("--out", dir, "output directory (default: stdout)"); }

    void write(const std::string& name, const std::string& text) const {
        if (dir.empty()) {
            std::cout << text;
            return;
        }
        std::filesystem::create_directories(dir);
        std::ofstream out(std::filesystem::path(dir) / name);
        if (!out) throw UsageError("cannot write into " + dir);
        out << text;
    }
    void write(const std::string& name, const json& j) const { write(name, j.dump(2) + "\n"); }
};

std::string num(double v) {
    if (v == 0) v = 0;  // no "-0"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json fit_with_error(const std::function<DecayFit()>& f) {
    try {
        return to_json(f());
    } catch (const Error& e) {
        return {{"error", e.name()}, {"message", e.what()}};
    }
}

std::vector<double> iota_positions(std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);
    return x;
}

bool sign_changes(const std::vector<double>& v, int from) {
    bool pos = false, neg = false;
    for (std::size_t i = static_cast<std::size_t>(std::max(from, 0)); i < v.size(); ++i) (v[i] > 0 ? pos : neg) = true;
    return pos && neg;
}

// The JSON config mirrors flag names; flags on the command line take precedence.
std::vector<std::string> merge_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    json cfg = read_json(path);
    if (!cfg.is_object()) throw UsageError("config must be a JSON object");
    auto present = [&](const std::string& flag) {
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        return false;
    };
    for (const auto& [key, value] : cfg.items()) {
        std::string flag = "--" + key;
        if (key == "config" || present(flag)) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
        } else {
            args.push_back(flag);
            args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
        }
    }
    return args;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
    auto r = rows.get<std::vector<std::vector<double>>>();
    Eigen::Index n = static_cast<Eigen::Index>(r.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (r[static_cast<std::size_t>(i)].size() != r.size()) throw UsageError("cm must be square");
        for (Eigen::Index k = 0; k < n; ++k) m(i, k) = r[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(row);
    }
    return rows;
}

GaussianChannel channel_arg(const std::string& file, int bonds, std::uint64_t seed) {
    if (!file.empty()) return channel_from_json(read_json(file));
    return random_channel(bonds, 1, seed);
}

Generator interaction_arg(const std::string& name, int N, double kappa) {
    if (name == "good1" || name == "good2") {
        CouplingStencil s;
        s.dimension = 1;
        if (name == "good1") {
            // sum Q^2 + P^2 + alpha (Q_i P_{i+1} + P_i Q_{i+1}), alpha = 0.3
            s.Q.entries[{0}] = 2;
            s.P.entries[{0}] = 2;
            s.QP.entries[{1}] = 0.3;
            s.QP.entries[{-1}] = 0.3;
        } else {
            // sum (Q_i + Q_{i+1})^2 + (P_i - P_{i+1})^2
            s.Q.entries[{0}] = 4;
            s.Q.entries[{1}] = s.Q.entries[{-1}] = 2;
            s.P.entries[{0}] = 4;
            s.P.entries[{1}] = s.P.entries[{-1}] = -2;
        }
        return generator_from_hamiltonian(s, N);
    }
    if (name == "kg") return generator_from_hamiltonian(klein_gordon(kappa), N);
    return generator_from_json(read_json(name));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"harmlat: ground states, correlations, GMPS and Trotter compilation for harmonic lattices"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config;
    app.add_option("--config", config, "JSON file with default flag values");

    ModelArgs model;
    Output out;
    int grid = 0;
    double tol = 0;
    std::uint64_t seed = 1;

    auto common = [&](CLI::App* sub, bool with_model = true) {
        if (with_model) model.add(sub);
        out.add(sub);
        sub->add_option("--grid", grid, "quadrature / sampling grid");
        sub->add_option("--tol", tol, "convergence tolerance");
        sub->add_option("--seed", seed, "seed for randomized fixtures");
    };

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "CSV of E(phi) on a grid");
    common(spectrum);

    // groundstate
    auto* gs = app.add_subcommand("groundstate", "CSV of ground-state correlations along the first axis");
    common(gs);
    int ring = 0, nmax = 50;
    gs->add_option("--N", ring, "ring size (0: thermodynamic limit)");
    gs->add_option("--nmax", nmax, "largest offset");

    // corrlength
    auto* corr = app.add_subcommand("corrlength", "correlation length from zeros, gap law and a fit");
    common(corr);
    int fitMin = 3;
    corr->add_option("--nmin", fitMin, "start of the fit window");

    // scaling
    auto* scaling = app.add_subcommand("scaling", "decay-law fit of a correlation sequence");
    common(scaling);
    std::string blockName = "gammaP", beta = "auto";
    int scaleMin = 8, scaleMax = 0;
    std::string envelope = "auto";
    scaling->add_option("--block", blockName, "gammaQ | gammaP | gammaQP | Einv | E");
    scaling->add_option("--nmin", scaleMin, "start of the fit window");
    scaling->add_option("--nmax", scaleMax, "end of the fit window (default 200 in 1D, 40 otherwise)");
    scaling->add_option("--beta", beta, "auto | free | fixed exponent value");
    scaling->add_option("--envelope", envelope, "auto | on | off")->check(CLI::IsMember({"auto", "on", "off"}));

    // gmps
    auto* gmps = app.add_subcommand("gmps", "Gaussian matrix product states");
    gmps->require_subcommand(1);
    std::string channelFile, inputFile, stateFile;
    int bonds = 1, sites = 6;
    auto gmps_common = [&](CLI::App* sub) {
        common(sub, false);
        sub->add_option("--channel", channelFile, "channel JSON {bondCount, outputModes, cm}");
        sub->add_option("--bonds", bonds, "bond count of the random fixture");
    };
    auto* gApply = gmps->add_subcommand("apply", "apply a channel state on (B, C) to an input CM");
    common(gApply, false);
    gApply->add_option("--channel", channelFile, "JSON {inputModes, cm} of the state on (B, C)");
    gApply->add_option("--input", inputFile, "JSON {cm} of the input state (default: vacuum)");
    auto* gBuild = gmps->add_subcommand("build", "CM of the GMPS on a ring");
    gmps_common(gBuild);
    gBuild->add_option("--N", sites, "ring size");
    auto* gFourier = gmps->add_subcommand("fourier", "CSV of gamma-hat(phi)");
    gmps_common(gFourier);
    auto* gRational = gmps->add_subcommand("rational", "trig-rational representation p, q, r, d");
    gmps_common(gRational);
    int corrMax = 30;
    gRational->add_option("--nmax", corrMax, "largest offset of the residue correlations");
    auto* gParent = gmps->add_subcommand("parent", "parent Hamiltonian stencil");
    gmps_common(gParent);
    gParent->add_option("--state", stateFile, "rational state JSON {p, q, r, d}");

    // trotter
    auto* trotter = app.add_subcommand("trotter", "Trotter compilation of translation-invariant symplectics");
    trotter->require_subcommand(1);
    auto* tCompile = trotter->add_subcommand("compile", "compile e^{A t} from local gates and one interaction");
    common(tCompile, false);
    std::string target = "kg", interaction = "good1", sequenceFile;
    int tN = 4;
    double tTime = 0.5, budget = 1e-3, tKappa = 0.5;
    tCompile->add_option("--target", target, "kg | nnn | generator JSON file");
    tCompile->add_option("--interaction", interaction, "good1 | good2 | kg | generator JSON file");
    tCompile->add_option("--N", tN, "ring size")->check(CLI::Range(2, 8));
    tCompile->add_option("--t", tTime, "evolution time");
    tCompile->add_option("--budget", budget, "operator-norm error budget");
    tCompile->add_option("--kappa", tKappa, "Klein-Gordon coupling of kg target or interaction");
    auto* tVerify = trotter->add_subcommand("verify", "recompute the error of a gate sequence");
    common(tVerify, false);
    tVerify->add_option("--sequence", sequenceFile, "gate sequence JSON")->required();

    try {
        auto args = merge_config(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return 1;
    }

    try {
        if (*spectrum) {
            CouplingStencil s = model.build();
            SpectralOptions opt;
            opt.grid = grid > 0 ? grid : (s.dimension == 1 ? 512 : 64);
            auto sf = spectral_function(s, opt);
            std::ostringstream csv;
            int d = s.dimension, G = sf.grid;
            for (int a = 0; a < d; ++a) csv << (d == 1 ? "phi" : "phi" + std::to_string(a + 1)) << ",";
            csv << "E\n";
            std::vector<int> idx(static_cast<std::size_t>(d), 0);
            for (std::size_t i = 0; i < sf.values.size(); ++i) {
                std::size_t rem = i;
                for (int a = d - 1; a >= 0; --a) {
                    idx[static_cast<std::size_t>(a)] = static_cast<int>(rem % static_cast<std::size_t>(G));
                    rem /= static_cast<std::size_t>(G);
                }
                for (int a = 0; a < d; ++a) csv << num(2 * std::numbers::pi * idx[static_cast<std::size_t>(a)] / G) << ",";
                csv << num(sf.values[i]) << "\n";
            }
            out.write("spectrum.csv", csv.str());
            if (sf.critical()) std::cerr << "critical: gap " << sf.gap.gap << "\n";
        } else if (*gs) {
            CouplingStencil s = model.build();
            Limit lim = ring > 0 ? Limit::ring(ring) : Limit::thermodynamic();
            if (ring == 0 && grid > 0) lim.startGrid = grid;
            if (tol > 0) lim.tol = tol;
            auto offs = offsets_on_axis(s.dimension, 0, nmax);
            auto st = ground_state_tinv(s, offs, lim);
            std::ostringstream csv;
            csv << "n" << (st.qDivergent ? "" : ",gammaQ") << ",gammaP,gammaQP\n";
            for (std::size_t i = 0; i < offs.size(); ++i) {
                csv << offs[i][0];
                if (!st.qDivergent) csv << "," << num(st.gammaQ[i]);
                csv << "," << num(st.gammaP[i]) << "," << num(st.gammaQP[i]) << "\n";
            }
            out.write("groundstate.csv", csv.str());
            if (st.qDivergent) std::cerr << "gammaQ diverges at the critical point; column omitted\n";
            for (const auto& w : st.warnings) std::cerr << "warning: " << w << "\n";
        } else if (*corr) {
            CouplingStencil s = model.build();
            auto rep = correlation_length_from_zeros(s);
            json j = to_json(rep);
            try {
                j["gapLaw"] = to_json(gap_law_prediction(s));
            } catch (const Error& e) {
                j["gapLaw"] = {{"error", e.name()}, {"message", e.what()}};
            }
            int n_hi = std::max(60, static_cast<int>(std::ceil(40 * rep.xi)));
            auto seqE = correlation_sequence(s, CorrelationBlock::Einv, offsets_on_axis(1, 0, n_hi), Limit::thermodynamic());
            j["fit"] = fit_with_error([&] {
                FitOptions fo;
                fo.power = false;
                fo.nMin = fitMin;
                return fit_decay(iota_positions(seqE.values.size()), seqE.values, fo);
            });
            out.write("corrlength.json", j);
        } else if (*scaling) {
            CouplingStencil s = model.build();
            int d = s.dimension;
            int hi = scaleMax > 0 ? scaleMax : (d == 1 ? 200 : 40);
            CorrelationBlock blk = parse_correlation_block(blockName);
            std::vector<double> values;
            int usedGrid = 0;
            double aniso = -1;
            if (d == 1) {
                Limit lim = Limit::thermodynamic();
                if (grid > 0) lim = Limit::grid(grid);
                if (tol > 0) lim.tol = tol;
                auto seq = correlation_sequence(s, blk, offsets_on_axis(1, 0, hi), lim);
                values = seq.values;
                usedGrid = seq.grid;
            } else if (d == 2) {
                auto c2 = correlation_matrix_2d(s, blk, hi, grid > 0 ? grid : 2048);
                for (int n = 0; n <= hi; ++n) values.push_back(c2.at(n, 0));
                usedGrid = c2.grid;
                aniso = c2.anisotropy;
            } else {
                auto seq = correlation_sequence(s, blk, offsets_on_axis(d, 0, hi), grid > 0 ? Limit::grid(grid) : Limit::thermodynamic());
                values = seq.values;
                usedGrid = seq.grid;
            }
            bool critical = gap(s).critical();
            FitOptions fo;
            fo.nMin = scaleMin;
            fo.nMax = hi;
            fo.envelope = envelope == "on" || (envelope == "auto" && sign_changes(values, scaleMin));
            json extra;
            if (beta == "auto") {
                if (critical) {
                    fo.exponential = false;
                    fo.freeBeta = false;
                    fo.fixedBetas = {static_cast<double>(d + 1)};
                    FitOptions ff = fo;
                    ff.freeBeta = true;
                    ff.fixedBetas.clear();
                    extra = fit_with_error([&] { return fit_decay(iota_positions(values.size()), values, ff); });
                } else {
                    fo.logExponents = {0.0};
                }
            } else if (beta == "free") {
                fo.exponential = false;
            } else {
                double b = 0;
                try {
                    b = std::stod(beta);
                } catch (const std::exception&) {
                    std::cerr << "usage: --beta must be auto, free or a number\n";
                    return 1;
                }
                fo.exponential = false;
                fo.freeBeta = false;
                fo.fixedBetas = {b};
            }
            json j = to_json(fit_decay(iota_positions(values.size()), values, fo));
            j["critical"] = critical;
            j["grid"] = usedGrid;
            j["envelope"] = fo.envelope;
            if (!extra.is_null()) j["freeBetaFit"] = extra;
            if (aniso >= 0) j["anisotropy"] = aniso;
            out.write("scaling.json", j);
        } else if (*gApply) {
            Eigen::MatrixXd G;
            int inputModes = 1;
            if (!channelFile.empty()) {
                json cj = read_json(channelFile);
                inputModes = cj.at("inputModes").get<int>();
                G = matrix_from_json(cj.at("cm"));
            } else {
                G = random_pure_cm(2, seed);
            }
            Eigen::MatrixXd in = inputFile.empty() ? Eigen::MatrixXd::Identity(2 * inputModes, 2 * inputModes)
                                                   : matrix_from_json(read_json(inputFile).at("cm"));
            Eigen::MatrixXd o = channel_apply(G, inputModes, in);
            out.write("apply.json", json{{"cm", matrix_to_json(o)}, {"purityResidual", validate_cm<double>(o).purityResidual}});
        } else if (*gBuild) {
            auto ch = channel_arg(channelFile, bonds, seed);
            Eigen::MatrixXd g = build_gmps_ring(ch, sites);
            out.write("gmps.json", json{{"N", sites},
                                        {"cm", matrix_to_json(g)},
                                        {"purityResidual", validate_cm<double>(g).purityResidual}});
        } else if (*gFourier) {
            auto ch = channel_arg(channelFile, bonds, seed);
            int G = grid > 0 ? grid : 256;
            std::ostringstream csv;
            int m = ch.outputModes;
            csv << "phi";
            for (int a = 0; a < 2 * m; ++a)
                for (int b = a; b < 2 * m; ++b) csv << ",re" << a << b << ",im" << a << b;
            csv << "\n";
            for (int r = 0; r < G; ++r) {
                double phi = 2 * std::numbers::pi * r / G;
                Eigen::MatrixXcd g = gmps_fourier(ch, phi);
                csv << num(phi);
                for (int a = 0; a < 2 * m; ++a)
                    for (int b = a; b < 2 * m; ++b) csv << "," << num(g(a, b).real()) << "," << num(g(a, b).imag());
                csv << "\n";
            }
            out.write("fourier.csv", csv.str());
        } else if (*gRational) {
            auto ch = channel_arg(channelFile, bonds, seed);
            auto rep = gmps_to_rational_report(ch);
            json j = to_json(rep.state);
            j["degree"] = rep.state.degree();
            j["reconstructionError"] = rep.reconstructionError;
            j["purityResidual"] = rep.purityResidual;
            auto cq = rational_correlations(rep.state, RationalElement::q, corrMax);
            j["xi"] = cq.xi;
            j["gammaQ"] = cq.values;
            j["gammaP"] = rational_correlations(rep.state, RationalElement::p, corrMax).values;
            j["gammaQP"] = rational_correlations(rep.state, RationalElement::r, corrMax).values;
            out.write("rational.json", j);
        } else if (*gParent) {
            TrigRationalState st = stateFile.empty() ? gmps_to_rational(channel_arg(channelFile, bonds, seed))
                                                     : rational_from_json(read_json(stateFile));
            out.write("parent.json", to_json(parent_hamiltonian(st)));
        } else if (*tCompile) {
            Generator inter = interaction_arg(interaction, tN, tKappa);
            Generator tg;
            if (target == "kg")
                tg = generator_from_hamiltonian(klein_gordon(tKappa), tN);
            else if (target == "nnn") {
                tg = Generator::zero(tN);
                tg.Q(2 % tN) += 0.25;
                tg.Q((tN - 2) % tN) += 0.25;
            } else
                tg = generator_from_json(read_json(target));
            CompileOptions co;
            co.budget = budget;
            auto seq = compile_simulation(tg, inter, tTime, co);
            out.write("sequence.json", to_json(seq));
        } else if (*tVerify) {
            auto seq = gate_sequence_from_json(read_json(sequenceFile));
            double err = verify_gate_sequence(seq);
            out.write("verify.json", json{{"achievedError", err}, {"recordedError", seq.achievedError}, {"gates", seq.gates.size()},
                                          {"repetitions", seq.repetitions}});
        }
    } catch (const BudgetExceeded& e) {
        std::cerr << e.what() << " (best error " << e.bestError << ")\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "usage: malformed input: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    return 0;
}
