#include "eetsim/config.hpp"
#include "eetsim/errors.hpp"

#include <doctest.h>

#include <string>

using namespace eetsim;

namespace {

const std::string kConfigs = EETSIM_CONFIG_DIR;

std::string error_of(const std::string& text, bool validate = false) {
    try {
        const RunConfig c = parse_run_config(text, "t.conf");
        if (validate) {
            c.validate();
        }
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults") {
    const RunConfig c = parse_run_config("");
    CHECK(c.noise.tau_c == 45.0);
    CHECK(c.noise.e_r == 35.0);
    CHECK(c.noise.temperature == 77.0);
    CHECK(c.rates.trap_site == 3);
    CHECK(c.t_final == 20000.0);
    CHECK(c.n_trajectories == 100);
    CHECK(c.integrator == Integrator::Split);
    CHECK(c.points().size() == 1);
    CHECK_FALSE(c.is_sweep());
    CHECK(c.hamiltonian.is_absolute());
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("sections, dotted keys and JSON describe the same run") {
    const std::string kv = "# comment\n"
                           "run.t_final = 1000\nrun.n_trajectories = 4\n"
                           "[noise]\ntau_c = 30   # inline\ntemperature = 300\n"
                           "[spatial]\nmodel = exponential\nrc_angstrom = 20\n"
                           "[sweep]\ninitial_site = 1, 6\n";
    const std::string dotted = "noise.tau_c = 30\nnoise.temperature = 300\nspatial.model = exponential:20\n"
                               "run.t_final = 1000\nrun.n_trajectories = 4\nsweep.initial_site = 1,6\n";
    const std::string json = R"({"noise": {"tau_c": 30, "temperature": 300},
        "spatial": {"model": "exponential", "rc_angstrom": 20},
        "run": {"t_final": 1000, "n_trajectories": 4}, "sweep": {"initial_site": [1, 6]}})";
    const RunConfig a = parse_run_config(kv);
    const RunConfig b = parse_run_config(dotted);
    const RunConfig c = parse_run_config(json);
    CHECK(a.noise.tau_c == 30.0);
    CHECK(a.spatial.tag() == "exponential:20");
    CHECK(a.sweep_sites == std::vector<int>{1, 6});
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() == c.hash());
    CHECK(a.canonical() == c.canonical());
    CHECK(parse_run_config(dotted + "run.master_seed = 2\n").hash() != a.hash());
}

TEST_CASE("output-only keys do not change the hash") {
    const RunConfig a = parse_run_config("output.directory = x\n");
    const RunConfig b = parse_run_config("output.directory = y\noutput.plots = false\n");
    CHECK(a.hash() == b.hash());
}

TEST_CASE("errors name the file, line and key") {
    CHECK(error_of("noise.tau_c = 45\nnoise.tau_c = fast\n").find("t.conf:2") != std::string::npos);
    CHECK(error_of("\n\nnoise.tauc = 45\n").find("t.conf:3") != std::string::npos);
    CHECK(error_of("noise.tauc = 45\n").find("noise.tauc") != std::string::npos);
    CHECK(error_of("this line has no equals sign\n").find("t.conf:1") != std::string::npos);
    CHECK(error_of("[noise\n").find("t.conf:1") != std::string::npos);
    CHECK(error_of("spatial.model = wavy\n").find("wavy") != std::string::npos);
    CHECK(error_of("run.integrator = euler\n").find("run.integrator") != std::string::npos);
    CHECK(error_of("{\"noise\": [1, 2]").find("t.conf") != std::string::npos);
    CHECK(error_of("{\"noise\": {\"colour\": 1}}").find("noise.colour") != std::string::npos);
}

TEST_CASE("validation ranges and dt preconditions") {
    CHECK(error_of("noise.tau_c = 0.5\n", true).find("noise.tau_c") != std::string::npos);
    CHECK(error_of("noise.temperature = 2000\n", true).find("t.conf:1") != std::string::npos);
    CHECK(error_of("sweep.tau_c = 10, 5000\n", true).find("sweep.tau_c") != std::string::npos);
    CHECK(error_of("noise.tau_c = 2\nrun.dt = 2\nrun.record_interval = 10\n", true).find("t.conf:2") !=
          std::string::npos);
    CHECK(error_of("run.dt = 3\n", true).find("run.dt") != std::string::npos);
    CHECK(error_of("run.n_trajectories = 1\n", true).find("run.n_trajectories") != std::string::npos);
    CHECK(error_of("files.hamiltonian = /nonexistent/h.txt\n", true).find("files.hamiltonian") != std::string::npos);
    CHECK(error_of("run.initial_site = 8\n", false).empty());
    CHECK_THROWS_AS(parse_run_config("run.initial_site = 8\n").ensemble_config(SweepPoint{45, 77, {}, 8}), InputError);
    CHECK(error_of("sweep.tau_c = 1, 1000\n", true).empty());
}

TEST_CASE("automatic time step") {
    CHECK(auto_dt(45.0, 10.0) == 1.0);
    CHECK(auto_dt(5.0, 10.0) == 0.5);
    CHECK(auto_dt(3.0, 10.0) == doctest::Approx(10.0 / 34.0));
    CHECK(auto_dt(1.0, 10.0) == 0.1);
    CHECK(auto_dt(1000.0, 0.25) == 0.25);
    const RunConfig c = parse_run_config("run.dt = 0.5\n");
    CHECK(c.dt_for(5.0) == 0.5);
    CHECK(parse_run_config("run.dt = auto\n").dt_for(5.0) == 0.5);
}

TEST_CASE("sweep points: cartesian product, tau_c outermost") {
    const RunConfig c = parse_run_config("sweep.tau_c = 15, 45\nsweep.temperature = 77, 300\n"
                                         "sweep.models = none, dimerized\nsweep.initial_site = 1, 6\n");
    const auto p = c.points();
    REQUIRE(p.size() == 16);
    CHECK(p[0].id() == "none_tau15_T77_site1");
    CHECK(p[1].id() == "none_tau15_T77_site6");
    CHECK(p[2].id() == "dimerized_tau15_T77_site1");
    CHECK(p[4].temperature == 300.0);
    CHECK(p[8].tau_c == 45.0);
    CHECK(SweepPoint{45, 77, SpatialModel::exponential(10), 1}.id() == "exponential-10_tau45_T77_site1");
    CHECK(c.is_sweep());
}

TEST_CASE("bundled configs parse and validate") {
    for (const char* name : {"/smoke.conf", "/smoke.json", "/fig1_77K.conf"}) {
        CAPTURE(name);
        const RunConfig c = load_run_config(kConfigs + name);
        CHECK_NOTHROW(c.validate());
        CHECK(c.output_dir.is_absolute());
    }
    const RunConfig fig = load_run_config(kConfigs + "/fig1_77K.conf");
    CHECK(fig.points().size() == 40);
    CHECK(fig.n_trajectories == 100);
    CHECK_THROWS_AS(load_run_config(kConfigs + "/missing.conf"), InputError);
}

TEST_CASE("FNV-1a reference values") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

}  // TEST_SUITE
