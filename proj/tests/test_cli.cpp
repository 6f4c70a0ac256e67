#include "commands.hpp"
#include "run_config.hpp"

#include <blochlab/io.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

using namespace blochlab;
using namespace blochlab::cli;

namespace {

const std::filesystem::path config_dir = BLOCHLAB_CONFIG_DIR;

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "blochlab_test_cli" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

int run_exe(const std::string& args)
{
    const std::string cmd = std::string(BLOCHLAB_EXE) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunConfig config(const std::string& file, const std::filesystem::path& out, std::vector<std::string> overrides = {})
{
    RunConfig cfg = load_config(config_dir / file, overrides);
    cfg.output_dir = out;
    return cfg;
}

} // namespace

TEST(ParseConfig, MinimalDefaults)
{
    const auto cfg = parse_config(R"({"potential": {"type": "cosine", "amplitude": -3}})");
    EXPECT_EQ(cfg.name, "run");
    EXPECT_EQ(cfg.potential.kind, PotentialSpec::Kind::cosine);
    EXPECT_EQ(cfg.potential.amplitude, -3.0);
    EXPECT_EQ(cfg.grids.num_k, 256UL);
    EXPECT_EQ(cfg.initial_state.kind, StateKind::wannier);
}

TEST(ParseConfig, OverridesApplyBeforeValidation)
{
    const auto cfg = parse_config(R"({"F": 0.05})", {"F=0.2", "initial_state.type=gaussian", "initial_state.rho=0.3",
                                                      "grids.num_k=64"});
    EXPECT_EQ(cfg.force, 0.2);
    EXPECT_EQ(cfg.initial_state.kind, StateKind::gaussian);
    EXPECT_EQ(cfg.initial_state.rho, 0.3);
    EXPECT_EQ(cfg.grids.num_k, 64UL);
    EXPECT_THROW(parse_config("{}", {"F"}), ConfigError);
    EXPECT_THROW(parse_config("{}", {"F.x=1"}), ConfigError);
    EXPECT_THROW(parse_config("{}", {"grids..num_k=3"}), ConfigError);
}

TEST(ParseConfig, Rejections)
{
    EXPECT_THROW(parse_config("not json"), ConfigError);
    EXPECT_THROW(parse_config(R"({"bogus": 1})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"F": -1})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"F": "fast"})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"grids": {"num_k": 7}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"potential": {"type": "square"}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"potential": {"type": "fourier", "coeffs": [[0, 0], [1, 0]]}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"initial_state": {"type": "gaussian", "rho": 0}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"initial_state": {"band": 1}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"grids": {"tau_step": 0.1, "tau_stride": 2}})"), ConfigError);
    EXPECT_THROW(load_config(config_dir / "missing.json"), ConfigError);
}

TEST(TauGrid, StrideStepAndIncommensurate)
{
    auto cfg = parse_config(R"({"grids": {"num_k": 16, "tau_max_periods": 1, "tau_stride": 4}})");
    const auto taus = build_tau_grid(cfg);
    ASSERT_EQ(taus.size(), 5UL);
    EXPECT_DOUBLE_EQ(taus.back(), 2 * M_PI);
    cfg = parse_config(R"({"grids": {"num_k": 16, "tau_max": 3.2, "tau_step": 0.7853981633974483}})");
    EXPECT_EQ(build_tau_grid(cfg).size(), 5UL);
    cfg = parse_config(R"({"grids": {"num_k": 16, "tau_max": 1, "tau_step": 0.3}})");
    EXPECT_THROW(build_tau_grid(cfg), ConfigError);
}

TEST(Commands, BandsReportsEmptyLatticeAndCosineWidths)
{
    const auto out = scratch("bands");
    std::ostringstream log;
    auto cfg = config("fig3_wannier.json", out);
    EXPECT_EQ(cmd_bands(cfg, log), ok);
    const auto b = io::read_bands(out / "fig3_wannier.bands.json");
    EXPECT_NEAR(b.band_width(0), 1.0, 1e-12);

    cfg = parse_config(R"({"name": "free", "potential": {"type": "cosine", "amplitude": 0},
                           "grids": {"num_k": 64, "cutoff": 8, "num_bands": 3, "check_cutoff": false}})");
    cfg.output_dir = out;
    std::ostringstream log2;
    EXPECT_EQ(cmd_bands(cfg, log2), ok);
    const auto e = io::read_bands(out / "free.bands.json");
    // Free particle: widths pi^2, 3 pi^2, 5 pi^2 for c = 1, d = 1.
    for (std::size_t n = 0; n < 3; ++n) EXPECT_NEAR(e.band_width(n), (2 * n + 1) * M_PI * M_PI, 1e-9);
}

TEST(Commands, TraceWannierHasNoDrift)
{
    const auto out = scratch("trace");
    std::ostringstream log;
    EXPECT_EQ(cmd_trace(config("fig3_wannier.json", out), log), ok);
    const std::string csv = io::read_text(out / "fig3_wannier.trace.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "tau,mean_k,dx,dS,sigma,chi");
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0;
    double max_dx = 0.0, max_sigma = 0.0;
    while (std::getline(in, line)) {
        double v[6];
        ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &v[0], &v[1], &v[2], &v[3], &v[4], &v[5]), 6);
        max_dx = std::max(max_dx, std::abs(v[2]));
        max_sigma = std::max(max_sigma, v[4]);
        ++rows;
    }
    EXPECT_EQ(rows, 257UL);
    EXPECT_LT(max_dx, 1e-12);
    EXPECT_NEAR(max_sigma, 10 * std::sqrt(2.0), 1e-6);
}

TEST(Commands, ReconstructNeedsBasisAndCommensurateSnapshots)
{
    const auto out = scratch("reconstruct");
    std::ostringstream log;
    EXPECT_THROW(cmd_reconstruct(config("fig3_wannier.json", out), log), ConfigError);
    const std::vector<std::string> small = {"grids.num_k=64", "grids.cutoff=16", "grids.num_bands=2",
                                            "potential.amplitude=-10", "F=0.2"};
    auto bad = small;
    bad.push_back("reconstruct.snapshots=[0.3]");
    EXPECT_THROW(cmd_reconstruct(config("fig4_sigma.json", out, bad), log), ConfigError);

    auto good = small;
    good.push_back("reconstruct.snapshots=[0, 1]");
    EXPECT_EQ(cmd_reconstruct(config("fig4_sigma.json", out, good), log), ok);
    const std::string p0 = io::read_text(out / "fig4_sigma.packet_0.csv");
    const std::string p1 = io::read_text(out / "fig4_sigma.packet_1.csv");
    EXPECT_EQ(p0.substr(0, p0.find('\n')), "x,re,im,density");

    // After one Bloch period the density recurs.
    std::istringstream a(p0), b(p1);
    std::string la, lb;
    std::getline(a, la);
    std::getline(b, lb);
    double worst = 0.0;
    while (std::getline(a, la) && std::getline(b, lb)) {
        double x0, r0, i0, d0, x1, r1, i1, d1;
        std::sscanf(la.c_str(), "%lf,%lf,%lf,%lf", &x0, &r0, &i0, &d0);
        std::sscanf(lb.c_str(), "%lf,%lf,%lf,%lf", &x1, &r1, &i1, &d1);
        EXPECT_EQ(x0, x1);
        worst = std::max(worst, std::abs(d0 - d1));
    }
    EXPECT_LT(worst, 1e-8);
}

TEST(Commands, OutputsAreDeterministic)
{
    const auto a = scratch("det_a"), b = scratch("det_b");
    std::ostringstream log;
    for (const auto& dir : {a, b}) {
        auto cfg = config("fig3_gaussian_rho01.json", dir);
        ASSERT_EQ(cmd_bands(cfg, log), ok);
        ASSERT_EQ(cmd_trace(cfg, log), ok);
    }
    for (const char* f : {"fig3_gaussian_rho01.bands.json", "fig3_gaussian_rho01.trace.csv"}) {
        EXPECT_EQ(io::read_text(a / f), io::read_text(b / f)) << f;
    }
}

TEST(Executable, ExitCodes)
{
    const auto out = scratch("exe");
    const std::string o = " --out " + out.string();
    EXPECT_EQ(run_exe("trace --config " + (config_dir / "fig3_wannier.json").string() + o), 0);
    EXPECT_EQ(run_exe("--help"), 0);
    EXPECT_EQ(run_exe("trace"), 2);
    EXPECT_EQ(run_exe("nonsense --config x"), 2);
    EXPECT_EQ(run_exe("trace --config " + (config_dir / "fig3_wannier.json").string() + o + " --override F=-1"), 2);
    EXPECT_EQ(run_exe("reconstruct --config " + (config_dir / "fig3_wannier.json").string() + o), 2);
    EXPECT_EQ(run_exe("validate --config " + (config_dir / "validate.json").string() + o +
                      " --override validate.acceleration_tolerance=0 --override validate.run_sweep=false"),
              3);
    EXPECT_TRUE(std::filesystem::exists(out / "validate.validation.json"));
}
