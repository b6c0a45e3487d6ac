// Exercises the library only through its C interface.
#include <tfpr/tfpr.h>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace
{
    std::string temp_dir()
    {
        const auto d = std::filesystem::temp_directory_path() / "tfpr_test_capi";
        std::filesystem::create_directories(d);
        return d.string();
    }

    std::string slurp(const std::string& path)
    {
        std::ifstream f(path);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }

    tfpr_experiment* small_experiment()
    {
        tfpr_experiment* e = nullptr;
        REQUIRE(tfpr_experiment_create(&e) == TFPR_OK);
        REQUIRE(tfpr_experiment_set(e, "algorithms", "pghi,spsi") == TFPR_OK);
        REQUIRE(tfpr_experiment_set(e, "lambdas", "1.486") == TFPR_OK);
        REQUIRE(tfpr_experiment_set(e, "redundancies", "4,8") == TFPR_OK);
        REQUIRE(tfpr_experiment_set(e, "timing", "off") == TFPR_OK);
        REQUIRE(tfpr_experiment_add_synthetic(e, "speech", 2, 16384, 7) == TFPR_OK);
        return e;
    }
}  // namespace

TEST_CASE("status strings and version", "[capi]")
{
    CHECK(std::string(tfpr_version()).size() > 0);
    CHECK(std::string(tfpr_status_string(TFPR_OK)) == "ok");
    CHECK(std::string(tfpr_status_string(TFPR_NOT_A_FRAME)) == "not a frame");
}

TEST_CASE("frames chosen from lambda and redundancy", "[capi]")
{
    tfpr_frame* f = nullptr;
    REQUIRE(tfpr_frame_create_for_lambda("hann", 3.34, 8, 122880, 22050, &f) == TFPR_OK);
    CHECK(tfpr_frame_channels(f) == 8 * tfpr_frame_hop(f));
    CHECK(122880 % tfpr_frame_channels(f) == 0);
    CHECK(tfpr_frame_lambda(f) == double(tfpr_frame_hop(f)) * double(tfpr_frame_channels(f)) / 22050.0);
    CHECK(tfpr_frame_window(f)[0] == 1.0);
    tfpr_frame_destroy(f);
}

TEST_CASE("a frame operator that cannot be inverted reports NotAFrame", "[capi]")
{
    // D = 1 with an even hop and an even number of frames is singular for symmetric windows
    tfpr_frame* f = nullptr;
    CHECK(tfpr_frame_create("gauss", 0.0, 64, 64, 4096, 22050, &f) == TFPR_NOT_A_FRAME);
    CHECK(f == nullptr);
    CHECK(std::string(tfpr_last_error()).size() > 0);
}

TEST_CASE("reconstruction algorithms", "[capi]")
{
    tfpr_signal* s = nullptr;
    REQUIRE(tfpr_signal_synth("harmonic", 16384, 22050, 1, &s) == TFPR_OK);
    tfpr_frame* f = nullptr;
    REQUIRE(tfpr_frame_create_for_lambda("gauss", 5.0, 8, 16384, 22050, &f) == TFPR_OK);
    tfpr_coeffs* c = nullptr;
    REQUIRE(tfpr_stft(f, s, &c) == TFPR_OK);

    double pe = -1.0;
    REQUIRE(tfpr_projection_error(f, c, &pe) == TFPR_OK);
    CHECK(pe >= 0.0);
    CHECK(pe < 1e-9);

    tfpr_pr_options o;
    tfpr_pr_options_default(&o);
    CHECK(o.fgla_iterations == 100);
    CHECK(o.fgla_alpha == 0.99);
    o.fgla_iterations = 20;
    for (const char* algo : {"pghi", "fgla", "fgla(3)", "spsi", "zerophase", "phasenoise(0.1)"})
    {
        tfpr_signal* r = nullptr;
        INFO(algo);
        REQUIRE(tfpr_reconstruct(f, c, algo, &o, &r) == TFPR_OK);
        CHECK(tfpr_signal_length(r) == 16384);
        double snr = 0.0;
        REQUIRE(tfpr_snr_ms(s, r, tfpr_frame_channels(f), &snr) == TFPR_OK);
        CHECK(std::isfinite(snr));
        tfpr_signal_destroy(r);
    }
    tfpr_signal* r = nullptr;
    CHECK(tfpr_reconstruct(f, c, "magic", &o, &r) == TFPR_INVALID_ARGUMENT);
    CHECK(r == nullptr);

    tfpr_frame* other = nullptr;
    REQUIRE(tfpr_frame_create("gauss", 0.0, 128, 512, 16384, 22050, &other) == TFPR_OK);
    CHECK(tfpr_istft(other, c, &r) == TFPR_DIMENSION);

    tfpr_frame_destroy(other);
    tfpr_coeffs_destroy(c);
    tfpr_frame_destroy(f);
    tfpr_signal_destroy(s);
}

TEST_CASE("wav through the C interface", "[capi]")
{
    tfpr_signal* s = nullptr;
    REQUIRE(tfpr_signal_synth("bursts", 61440, 22050, 1, &s) == TFPR_OK);
    const std::string path = temp_dir() + "/bursts.wav";
    REQUIRE(tfpr_signal_write_wav(s, path.c_str(), 1) == TFPR_OK);
    tfpr_signal* t = nullptr;
    REQUIRE(tfpr_signal_read_wav(path.c_str(), 22050, 61440, &t) == TFPR_OK);
    for (std::size_t i = 0; i < 61440; ++i)
        REQUIRE(tfpr_signal_data(t)[i] == double(float(tfpr_signal_data(s)[i])));
    tfpr_signal_destroy(t);
    tfpr_signal_destroy(s);
}

TEST_CASE("experiment configuration", "[capi]")
{
    tfpr_experiment* e = nullptr;
    REQUIRE(tfpr_experiment_create(&e) == TFPR_OK);
    CHECK(tfpr_experiment_set(e, "lambdas", "logspace:0.01:1000:6") == TFPR_OK);
    CHECK(tfpr_experiment_set(e, "algorithms", "pghi,fgla(20),phasenoise(0.5)") == TFPR_OK);
    CHECK(tfpr_experiment_set(e, "windows", "gauss,hann") == TFPR_OK);
    CHECK(tfpr_experiment_set(e, "trim", "off") == TFPR_OK);
    CHECK(tfpr_experiment_set(e, "nonsense", "1") == TFPR_INVALID_ARGUMENT);
    CHECK(tfpr_experiment_set(e, "seed", "-3") == TFPR_INVALID_ARGUMENT);
    CHECK(tfpr_experiment_set(e, "lambdas", "1,abc") == TFPR_INVALID_ARGUMENT);
    CHECK(tfpr_experiment_set(e, "windows", "square") == TFPR_INVALID_ARGUMENT);
    CHECK(tfpr_experiment_set(e, "trim", "maybe") == TFPR_INVALID_ARGUMENT);

    tfpr_results* r = nullptr;
    CHECK(tfpr_run_sweep(e, &r) == TFPR_INVALID_ARGUMENT);  // no corpus yet
    CHECK(r == nullptr);
    CHECK(tfpr_experiment_add_synthetic(e, "pulses", 1, 4096, 1) == TFPR_OK);
    CHECK(tfpr_experiment_add_synthetic(e, "pulses", 1, 4096, 1) == TFPR_INVALID_ARGUMENT);  // duplicate id
    CHECK(tfpr_experiment_corpus_size(e) == 1);
    CHECK(tfpr_experiment_add_corpus_dir(e, "/nonexistent", 0) == TFPR_IO);
    tfpr_experiment_destroy(e);
}

TEST_CASE("sweep results", "[capi]")
{
    tfpr_experiment* e = small_experiment();
    tfpr_results* r = nullptr;
    REQUIRE(tfpr_run_sweep(e, &r) == TFPR_OK);
    REQUIRE(tfpr_results_count(r) == 2 * 2 * 2);
    tfpr_row row;
    REQUIRE(tfpr_results_row(r, 0, &row) == TFPR_OK);
    CHECK(std::string(row.algorithm) == "pghi");
    CHECK(std::string(row.window) == "gauss");
    CHECK(row.D == 4);
    CHECK(row.M == 4 * row.a);
    CHECK(std::string(row.signal_id) == "speech00");
    CHECK(std::string(row.status) == "ok");
    CHECK(row.wall_time_s == 0.0);
    CHECK(tfpr_results_row(r, 8, &row) == TFPR_INVALID_ARGUMENT);
    CHECK(tfpr_results_below_threshold(r) == 0);

    const std::string dir = temp_dir();
    REQUIRE(tfpr_results_write(r, (dir + "/a.csv").c_str(), "csv") == TFPR_OK);
    REQUIRE(tfpr_results_write(r, (dir + "/a.json").c_str(), "json") == TFPR_OK);
    REQUIRE(tfpr_results_write_spec(r, (dir + "/a.spec.json").c_str()) == TFPR_OK);
    CHECK(tfpr_results_write(r, (dir + "/a.xml").c_str(), "xml") == TFPR_INVALID_ARGUMENT);
    const std::string csv = slurp(dir + "/a.csv");
    CHECK(csv.rfind("algorithm,window,lambda_requested,lambda_realized,D,a,M,signal_id,snr_ms_db,projection_error,"
                    "wall_time_s,iterations,seed,status\n",
                    0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
    CHECK(slurp(dir + "/a.spec.json").find("\"experiment\": \"sweep\"") != std::string::npos);
    CHECK(slurp(dir + "/a.json").find("\"odg\": null") != std::string::npos);

    // a second run gives identical bytes
    tfpr_results* r2 = nullptr;
    REQUIRE(tfpr_run_sweep(e, &r2) == TFPR_OK);
    REQUIRE(tfpr_results_write(r2, (dir + "/b.csv").c_str(), "csv") == TFPR_OK);
    CHECK(slurp(dir + "/b.csv") == csv);

    tfpr_results_destroy(r2);
    tfpr_results_destroy(r);
    tfpr_experiment_destroy(e);
}

TEST_CASE("noise, filter and optimize runs", "[capi]")
{
    tfpr_experiment* e = small_experiment();
    REQUIRE(tfpr_experiment_set(e, "sigmas", "0.1,1.0") == TFPR_OK);
    tfpr_results* r = nullptr;
    REQUIRE(tfpr_run_noise(e, &r) == TFPR_OK);
    CHECK(tfpr_results_count(r) == 2 * 2 * 2);
    tfpr_results_destroy(r);

    REQUIRE(tfpr_experiment_set(e, "iterations", "5") == TFPR_OK);
    REQUIRE(tfpr_experiment_set(e, "algorithms", "pghi,fgla") == TFPR_OK);
    REQUIRE(tfpr_run_filter(e, &r) == TFPR_OK);
    CHECK(tfpr_results_count(r) == 3 * 2 * 2);
    tfpr_row row;
    REQUIRE(tfpr_results_row(r, 0, &row) == TFPR_OK);
    CHECK(std::string(row.algorithm) == "reference");
    REQUIRE(tfpr_results_row(r, 2, &row) == TFPR_OK);
    CHECK(std::string(row.algorithm) == "fgla(5)");
    tfpr_results_destroy(r);

    CHECK(tfpr_run_optimize(e, &r) == TFPR_INVALID_ARGUMENT);  // two algorithms
    REQUIRE(tfpr_experiment_set(e, "algorithms", "pghi") == TFPR_OK);
    REQUIRE(tfpr_experiment_set(e, "redundancies", "2") == TFPR_OK);
    REQUIRE(tfpr_experiment_set(e, "snr_threshold_db", "inf") == TFPR_OK);
    REQUIRE(tfpr_run_optimize(e, &r) == TFPR_OK);
    CHECK(tfpr_results_below_threshold(r) == 1);
    CHECK(tfpr_results_count(r) > 0);
    const std::string dir = temp_dir();
    REQUIRE(tfpr_results_write(r, (dir + "/o.csv").c_str(), "csv") == TFPR_OK);
    CHECK(slurp(dir + "/o.csv").rfind("algorithm,D,lambda_lo", 0) == 0);
    REQUIRE(tfpr_results_write_cells(r, (dir + "/o.cells.csv").c_str()) == TFPR_OK);
    REQUIRE(tfpr_results_write_spec(r, (dir + "/o.spec.json").c_str()) == TFPR_OK);
    CHECK(slurp(dir + "/o.spec.json").find("\"snr_threshold_db\": \"inf\"") != std::string::npos);
    tfpr_results_destroy(r);
    tfpr_experiment_destroy(e);
}
