#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "indist/bounds.hpp"
#include "indist/hom.hpp"
#include "indist/io.hpp"
#include "indist/parallel.hpp"
#include "indist/simulator.hpp"
#include "indist/stats.hpp"
#include "indist/surfaces.hpp"

namespace {

using nlohmann::json;
using namespace indist;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDomain = 3;

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string config_path;
    std::string configuration;  // letter string, e.g. XXYY
    std::vector<double> visibilities;
    bool do_postselect = false;
    std::string noise = "none";
    std::string out_path = "-";
};

int run_simulate(const SimulateArgs& args) {
    io::ExperimentConfig cfg =
        args.config_path.empty() ? io::default_config() : io::read_config_file(args.config_path);
    if (!args.visibilities.empty()) {
        if (args.visibilities.size() != 3) throw io::ParseError("--visibilities needs 3 values");
        cfg.visibilities = {args.visibilities[0], args.visibilities[1], args.visibilities[2]};
    }

    MixtureModel mixture;
    if (!args.configuration.empty()) {
        mixture = MixtureModel({{1.0, canonical_partition(args.configuration)}});
    } else {
        mixture = sim::build_rho_source(cfg.visibilities[0], cfg.visibilities[1],
                                        cfg.visibilities[2]);
    }

    OutputDistribution dist;
    double retained_mass = 1.0, discarded_mass = 0.0;
    if (args.noise == "none") {
        const ModeOccupation input({1, 1, 0, 0, 1, 1});
        dist = sim::evolve_mixture(cfg.interferometer, input, mixture, cfg.source);
        if (args.do_postselect) {
            const sim::OutputClassifier classifier(cfg.interferometer, cfg.source);
            const sim::PostselectResult ps = sim::postselect(dist, classifier);
            dist = ps.retained;
            retained_mass = ps.retained_mass;
            discarded_mass = ps.discarded_mass;
        }
    } else if (args.noise == "full") {
        const sim::ClickDistribution clicks =
            sim::simulate_noisy(cfg.interferometer, cfg.source, cfg.detection, mixture);
        dist = sim::fourfold_occupations(clicks);
        if (args.do_postselect) {
            const sim::OutputClassifier classifier(cfg.interferometer, cfg.source);
            const sim::PostselectResult ps = sim::postselect(dist, classifier);
            dist = ps.retained;
            retained_mass = ps.retained_mass;
            discarded_mass = ps.discarded_mass;
        } else {
            dist.normalize();  // conditional on a four-fold click event
        }
    } else {
        throw io::ParseError("--noise must be 'none' or 'full'");
    }

    const std::string csv = io::write_distribution_csv(dist);
    if (args.out_path == "-")
        std::cout << csv;
    else
        io::write_file(args.out_path, csv);
    if (args.do_postselect)
        std::cerr << "post-selection retained mass " << retained_mass << ", discarded "
                  << discarded_mass << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

struct BoundsArgs {
    std::vector<double> overlaps;
    std::vector<double> sigmas;
    std::string model = "both";
    std::string dimension = "general";
    int replicates = 1000;
    std::uint64_t seed = 1;
    bool as_json = false;
};

json interval_json(const Interval& iv, const bounds::IntervalSigma* sigma) {
    json j{{"lo", iv.lo}, {"hi", iv.hi}};
    if (sigma) {
        j["sigma_lo"] = sigma->lo;
        j["sigma_hi"] = sigma->hi;
    }
    return j;
}

void print_interval(const char* name, const Interval& iv, const bounds::IntervalSigma* sigma) {
    std::cout << "  " << name << ": [" << iv.lo << ", " << iv.hi << "]";
    if (sigma) std::cout << "  (sigma " << sigma->lo << ", " << sigma->hi << ")";
    std::cout << "\n";
}

int run_bounds(const BoundsArgs& args) {
    if (args.overlaps.size() != 3) throw io::ParseError("--overlaps needs r_AB r_BC r_CD");
    for (double r : args.overlaps)
        if (!(r >= 0.0 && r <= 1.0))
            throw OutOfRangeOverlap("overlap " + std::to_string(r) + " outside [0, 1]");
    double s[3] = {0.0, 0.0, 0.0};
    const bool with_sigmas = !args.sigmas.empty();
    if (with_sigmas) {
        if (args.sigmas.size() != 3) throw io::ParseError("--sigmas needs three values");
        for (int i = 0; i < 3; ++i) s[i] = args.sigmas[i];
    }
    const OverlapGraph g = OverlapGraph::chain_abcd(args.overlaps[0], args.overlaps[1],
                                                    args.overlaps[2], s[0], s[1], s[2]);
    const bounds::DimensionHint hint = args.dimension == "qubit"
                                           ? bounds::DimensionHint::qubit
                                           : bounds::DimensionHint::general;
    const bool want_classical = args.model == "classical" || args.model == "both";
    const bool want_product = args.model == "product" || args.model == "both";
    if (!want_classical && !want_product)
        throw io::ParseError("--model must be classical, product or both");

    std::optional<bounds::BoundsSigmas> sigmas;
    if (with_sigmas)
        sigmas = bounds::propagate_bound_sigmas(g, hint, args.replicates, args.seed);

    json out;
    out["overlaps"] = {{"AB", args.overlaps[0]}, {"BC", args.overlaps[1]}, {"CD", args.overlaps[2]}};
    if (with_sigmas)
        out["sigmas"] = {{"AB", s[0]}, {"BC", s[1]}, {"CD", s[2]}};

    if (want_classical) {
        const bounds::ClassicalBoundsReport rep = bounds::classical_bounds(g);
        if (!args.as_json) {
            std::cout << "classical mixture model:\n";
            print_interval("c1  ", rep.c1.value, sigmas ? &sigmas->c1 : nullptr);
            print_interval("r_AC", rep.r_ac.value, sigmas ? &sigmas->cl_r_ac : nullptr);
            print_interval("r_BD", rep.r_bd.value, sigmas ? &sigmas->cl_r_bd : nullptr);
            print_interval("r_AD", rep.r_ad.value, sigmas ? &sigmas->cl_r_ad : nullptr);
            if (rep.model_inconsistent)
                std::cout << "  model inconsistent: raw c1 range [" << rep.c1.raw_lo << ", "
                          << rep.c1.raw_hi << "] is empty\n";
        }
        json cls;
        cls["c1"] = interval_json(rep.c1.value, sigmas ? &sigmas->c1 : nullptr);
        cls["r_AC"] = interval_json(rep.r_ac.value, sigmas ? &sigmas->cl_r_ac : nullptr);
        cls["r_BD"] = interval_json(rep.r_bd.value, sigmas ? &sigmas->cl_r_bd : nullptr);
        cls["r_AD"] = interval_json(rep.r_ad.value, sigmas ? &sigmas->cl_r_ad : nullptr);
        cls["model_inconsistent"] = rep.model_inconsistent;
        out["classical"] = cls;
    }
    if (want_product) {
        const bounds::ProductBoundsReport rep = bounds::product_bounds(g, hint);
        if (!args.as_json) {
            std::cout << "separable pure state model (" << args.dimension << "):\n";
            print_interval("r_AC", rep.r_ac, sigmas ? &sigmas->pr_r_ac : nullptr);
            print_interval("r_BD", rep.r_bd, sigmas ? &sigmas->pr_r_bd : nullptr);
            print_interval("r_AD", rep.r_ad, sigmas ? &sigmas->pr_r_ad : nullptr);
            print_interval("r_AD (endpoint rule)", rep.r_ad_endpoint,
                           sigmas ? &sigmas->pr_r_ad_endpoint : nullptr);
        }
        json pr;
        pr["r_AC"] = interval_json(rep.r_ac, sigmas ? &sigmas->pr_r_ac : nullptr);
        pr["r_BD"] = interval_json(rep.r_bd, sigmas ? &sigmas->pr_r_bd : nullptr);
        pr["r_AD"] = interval_json(rep.r_ad, sigmas ? &sigmas->pr_r_ad : nullptr);
        pr["r_AD_endpoint"] = interval_json(rep.r_ad_endpoint,
                                            sigmas ? &sigmas->pr_r_ad_endpoint : nullptr);
        out["product"] = pr;
    }
    if (args.as_json) std::cout << out.dump(2) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// counts
// ---------------------------------------------------------------------------

struct CountsArgs {
    std::string counts_path;
    std::string expected_path;
    std::string config_path;
    bool estimate = false;
    bool want_tvd = false;
    bool do_postselect = false;
    int replicates = 1000;
    std::uint64_t seed = 1;
};

int run_counts(const CountsArgs& args) {
    const stats::CountsRecord counts = io::read_counts_csv_file(args.counts_path);
    io::ExperimentConfig cfg =
        args.config_path.empty() ? io::default_config() : io::read_config_file(args.config_path);

    sim::EstimatorOptions est_options;
    for (int i = 0; i < 3 && i < static_cast<int>(cfg.interferometer.layer2.size()); ++i)
        est_options.layer2_reflectivity[i] = cfg.interferometer.layer2[i].reflectivity;

    std::optional<sim::OutputClassifier> classifier;
    if (args.do_postselect) classifier.emplace(cfg.interferometer, cfg.source);

    auto prepare = [&](const OutputDistribution& raw) {
        if (!classifier) return raw;
        return sim::postselect(raw, *classifier).retained;
    };

    if (args.estimate) {
        const OutputDistribution dist = prepare(stats::normalize(counts));
        const OverlapGraph g =
            sim::estimate_overlaps_from_distribution(dist, cfg.source, est_options);
        const auto estimator = [&](const OutputDistribution& d) {
            const OverlapGraph sample =
                sim::estimate_overlaps_from_distribution(prepare(d), cfg.source, est_options);
            std::vector<double> vals;
            for (const auto& [key, edge] : sample.edges()) vals.push_back(edge.value);
            return vals;
        };
        const auto propagated = stats::propagate(counts, estimator, args.replicates, args.seed);
        size_t k = 0;
        for (const auto& [key, edge] : g.edges()) {
            std::cout << "r_" << key.first << key.second << " = " << edge.value << " +- "
                      << propagated[k].sigma << (edge.clamped ? "  (clamped)" : "") << "\n";
            ++k;
        }
    }

    if (args.want_tvd) {
        OutputDistribution expected;
        if (!args.expected_path.empty()) {
            std::ifstream in(args.expected_path);
            if (!in) throw io::ParseError("cannot open expected file: " + args.expected_path);
            expected = io::read_distribution_csv(in);
        } else {
            const MixtureModel mixture = sim::build_rho_source(
                cfg.visibilities[0], cfg.visibilities[1], cfg.visibilities[2]);
            const sim::ClickDistribution clicks =
                sim::simulate_noisy(cfg.interferometer, cfg.source, cfg.detection, mixture);
            const sim::OutputClassifier cls(cfg.interferometer, cfg.source);
            expected = sim::postselect(sim::fourfold_occupations(clicks), cls).retained;
        }
        const OutputDistribution measured = prepare(stats::normalize(counts));
        const double value = stats::tvd(measured, expected);
        const auto statistic = [&](const OutputDistribution& d) {
            return std::vector<double>{stats::tvd(prepare(d), expected)};
        };
        const auto propagated = stats::propagate(counts, statistic, args.replicates, args.seed);
        std::cout << "TVD = " << value << " +- " << propagated[0].sigma << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// surface
// ---------------------------------------------------------------------------

struct SurfaceArgs {
    std::vector<double> visibilities;
    std::vector<double> widths = {1.0, 1.0, 1.0};
    double box = 4.0;
    int grid = 0;
    long long mc_samples = 0;
    bool ratio_to_ideal = false;
    std::string mesh_path;
    int mesh_grid = 64;
    std::uint64_t seed = 1;
};

int run_surface(const SurfaceArgs& args) {
    if (args.visibilities.size() != 3) throw io::ParseError("--visibilities needs 3 values");
    if (args.widths.size() != 3) throw io::ParseError("--widths needs 3 values");
    surf::DelayAxes axes;
    axes.visibility = {args.visibilities[0], args.visibilities[1], args.visibilities[2]};
    axes.width = {args.widths[0], args.widths[1], args.widths[2]};
    axes.box_halfwidth_sigmas = args.box;
    axes.validate();

    const bool use_mc = args.mc_samples > 0;
    if (!use_mc && args.grid < 32)
        throw io::ParseError("--grid must be >= 32 (or use --mc SAMPLES)");
    const surf::VolumeMethod method =
        use_mc ? surf::VolumeMethod::monte_carlo : surf::VolumeMethod::grid;
    const long long arg = use_mc ? args.mc_samples : args.grid;

    const surf::VolumeResult vol = surf::nontrivial_region_volume(axes, method, arg, args.seed);
    std::cout << "volume = " << vol.volume;
    if (use_mc) std::cout << " +- " << vol.standard_error;
    std::cout << "\n";

    if (args.ratio_to_ideal) {
        const surf::RatioResult ratio = surf::volume_ratio(axes, method, arg, args.seed);
        std::cout << "ideal volume = " << ratio.denominator.volume << "\n";
        std::cout << "ratio = " << ratio.ratio;
        if (use_mc) std::cout << " +- " << ratio.standard_error;
        std::cout << "\n";
    }

    if (!args.mesh_path.empty()) {
        const surf::Mesh mesh = surf::extract_isosurface(axes, args.mesh_grid);
        io::write_file(args.mesh_path, surf::mesh_to_text(mesh));
        std::cout << "mesh: " << mesh.vertices.size() << " vertices, " << mesh.triangles.size()
                  << " triangles -> " << args.mesh_path << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// fit-dip
// ---------------------------------------------------------------------------

int run_fit_dip(const std::string& path) {
    const std::vector<hom::DipPoint> points = io::read_dip_csv_file(path);
    const hom::DipFit fit = hom::fit_dip(points);
    auto sigma = [&](int k) { return std::sqrt(std::max(0.0, fit.covariance(k, k))); };
    std::cout << "A     = " << fit.params.amplitude << " +- " << sigma(0) << "\n";
    std::cout << "B     = " << fit.params.drift << " +- " << sigma(1) << "\n";
    std::cout << "V     = " << fit.params.visibility << " +- " << sigma(2) << "\n";
    std::cout << "x0    = " << fit.params.center << " +- " << sigma(3) << "\n";
    std::cout << "sigma = " << fit.params.width << " +- " << sigma(4) << "\n";
    std::cout << "residual norm = " << fit.residual_norm << " (" << fit.iterations
              << " iterations)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    indist::apply_thread_cap_from_env();

    CLI::App app{"Four-photon indistinguishability toolkit: six-mode interferometer "
                 "simulation and overlap-bound inference"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Expected output distribution");
    sim_cmd->add_option("--config", sim_args.config_path, "experiment config (JSON)");
    sim_cmd->add_option("--configuration", sim_args.configuration,
                        "distinguishability class string, e.g. XXXX or XXYZ");
    sim_cmd->add_option("--visibilities", sim_args.visibilities,
                        "pair visibilities V_AB V_BC V_CD")->expected(3);
    sim_cmd->add_flag("--postselect", sim_args.do_postselect,
                      "keep only outcomes of the (1,1,0,0,1,1) input class");
    sim_cmd->add_option("--noise", sim_args.noise, "none | full")->default_val("none");
    sim_cmd->add_option("--out", sim_args.out_path, "output CSV path ('-' = stdout)");

    BoundsArgs bounds_args;
    CLI::App* bounds_cmd = app.add_subcommand("bounds", "c1 and unmeasured-overlap bounds");
    bounds_cmd->add_option("--overlaps", bounds_args.overlaps, "measured r_AB r_BC r_CD")
        ->expected(3)->required();
    bounds_cmd->add_option("--sigmas", bounds_args.sigmas, "overlap uncertainties")->expected(3);
    bounds_cmd->add_option("--model", bounds_args.model, "classical | product | both");
    bounds_cmd->add_option("--dimension", bounds_args.dimension, "qubit | general");
    bounds_cmd->add_option("--replicates", bounds_args.replicates, "Monte-Carlo replicates");
    bounds_cmd->add_option("--seed", bounds_args.seed, "random seed");
    bounds_cmd->add_flag("--json", bounds_args.as_json, "machine-readable output");

    CountsArgs counts_args;
    CLI::App* counts_cmd = app.add_subcommand("counts", "Statistics from measured counts");
    counts_cmd->add_option("counts", counts_args.counts_path, "counts CSV")->required();
    counts_cmd->add_option("--expected", counts_args.expected_path, "expected distribution CSV");
    counts_cmd->add_option("--config", counts_args.config_path, "experiment config (JSON)");
    counts_cmd->add_flag("--estimate-overlaps", counts_args.estimate,
                         "estimate r_AB, r_BC, r_CD from bunching");
    counts_cmd->add_flag("--tvd", counts_args.want_tvd, "total variation distance to expected");
    counts_cmd->add_flag("--postselect", counts_args.do_postselect,
                         "restrict to the (1,1,0,0,1,1) input class first");
    counts_cmd->add_option("--replicates", counts_args.replicates, "Monte-Carlo replicates");
    counts_cmd->add_option("--seed", counts_args.seed, "random seed");

    SurfaceArgs surface_args;
    CLI::App* surface_cmd = app.add_subcommand("surface", "Delay-space region analysis");
    surface_cmd->add_option("--visibilities", surface_args.visibilities,
                            "pair visibilities V_AB V_BC V_CD")->expected(3)->required();
    surface_cmd->add_option("--widths", surface_args.widths, "Gaussian widths per axis")
        ->expected(3);
    surface_cmd->add_option("--box", surface_args.box, "box half-width in width units");
    surface_cmd->add_option("--grid", surface_args.grid, "grid resolution (>= 32)");
    surface_cmd->add_option("--mc", surface_args.mc_samples, "Monte-Carlo samples");
    surface_cmd->add_flag("--ratio-to-ideal", surface_args.ratio_to_ideal,
                          "also print the volume ratio against ideal visibilities");
    surface_cmd->add_option("--mesh", surface_args.mesh_path, "write the boundary mesh here");
    surface_cmd->add_option("--mesh-grid", surface_args.mesh_grid, "mesh grid resolution");
    surface_cmd->add_option("--seed", surface_args.seed, "random seed");

    std::string dip_path;
    CLI::App* dip_cmd = app.add_subcommand("fit-dip", "Fit the coincidence-dip model");
    dip_cmd->add_option("points", dip_path, "dip scan CSV (dx,count[,sigma])")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*sim_cmd) return run_simulate(sim_args);
        if (*bounds_cmd) return run_bounds(bounds_args);
        if (*counts_cmd) return run_counts(counts_args);
        if (*surface_cmd) return run_surface(surface_args);
        if (*dip_cmd) return run_fit_dip(dip_path);
    } catch (const EmptyPostselection& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const NoConditionedEvents& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const BoxTooSmall& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const NonConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
