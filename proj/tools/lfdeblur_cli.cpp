// SPDX-License-Identifier: Apache-2.0
//
// lfdeblur: synthesize 6-DOF motion-blurred light fields and restore them
// with the recurrent sub-aperture deblurring network.
//
// Subcommands: trajgen, synth, dataset, train, infer, eval, epi.
// Exit codes: 0 success, 1 usage/config error, 2 runtime error.

#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lfdeblur/blur.hpp"
#include "lfdeblur/dataset.hpp"
#include "lfdeblur/json_io.hpp"
#include "lfdeblur/lightfield_io.hpp"
#include "lfdeblur/metrics.hpp"
#include "lfdeblur/net/network.hpp"
#include "lfdeblur/net/trainer.hpp"
#include "lfdeblur/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace lfdeblur;

namespace {

void write_run_config(const fs::path& dir, const std::string& subcommand, ordered_json params) {
    ordered_json j;
    j["tool"] = "lfdeblur";
    j["tool_version"] = kVersion;
    j["subcommand"] = subcommand;
    j["params"] = std::move(params);
    fs::create_directories(dir);
    save_json_file(j, dir / "run-config.json");
}

struct BoundsFlags {
    std::string file;
    double max_p_x = -1, max_p_y = -1, max_p_z = -1;
    double max_phi = -1, max_theta = -1, max_psi = -1;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--bounds", file, "Motion bounds JSON file");
        cmd->add_option("--max-p-x", max_p_x, "Max |p_x| in baseline units (overrides --bounds)");
        cmd->add_option("--max-p-y", max_p_y, "Max |p_y| in baseline units");
        cmd->add_option("--max-p-z", max_p_z, "Max |p_z| shear per pixel");
        cmd->add_option("--max-phi", max_phi, "Max |phi| pitch in radians");
        cmd->add_option("--max-theta", max_theta, "Max |theta| yaw in radians");
        cmd->add_option("--max-psi", max_psi, "Max |psi| roll in radians");
    }

    MotionBounds resolve() const {
        MotionBounds b;
        if (!file.empty()) b = bounds_from_json(load_json_file(file));
        if (max_p_x >= 0) b.max_p_x = max_p_x;
        if (max_p_y >= 0) b.max_p_y = max_p_y;
        if (max_p_z >= 0) b.max_p_z = max_p_z;
        if (max_phi >= 0) b.max_phi = max_phi;
        if (max_theta >= 0) b.max_theta = max_theta;
        if (max_psi >= 0) b.max_psi = max_psi;
        return b;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"light field blur synthesis and recurrent deblurring"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    // trajgen
    auto* trajgen = app.add_subcommand("trajgen", "Generate random 6-DOF trajectory JSONs");
    struct {
        uint64_t seed = 0;
        int count = 1;
        int n_time = 32;
        std::string out;
        BoundsFlags bounds;
    } tg;
    trajgen->add_option("--seed", tg.seed, "Base seed; trajectory i uses seed+i");
    trajgen->add_option("--count", tg.count, "Number of trajectories")->check(CLI::PositiveNumber);
    trajgen->add_option("--n-time", tg.n_time, "Integration sample count stored in the JSON");
    trajgen->add_option("--out", tg.out, "Output directory")->required();
    tg.bounds.add_to(trajgen);

    // synth
    auto* synth = app.add_subcommand("synth", "Blur one light field with one trajectory");
    struct {
        std::string lf, trajectory, job_config, out;
        std::string mode = "literal_eq13";
        uint64_t seed = 0;
        int n_time = 32;
        BoundsFlags bounds;
    } sy;
    synth->add_option("--lf", sy.lf, "Sharp light-field directory")->required();
    synth->add_option("--trajectory", sy.trajectory, "Trajectory JSON (else drawn from --seed and bounds)");
    synth->add_option("--job-config", sy.job_config, "Blur job JSON: bounds, n_time_samples, warp_mode, seed");
    synth->add_option("--seed", sy.seed, "Trajectory seed when --trajectory is absent");
    synth->add_option("--n-time", sy.n_time, "Number of integration time samples");
    synth->add_option("--mode", sy.mode, "Warp mode: literal_eq13 | spatial_rotation");
    synth->add_option("--out", sy.out, "Output directory")->required();
    sy.bounds.add_to(synth);

    // dataset
    auto* dataset = app.add_subcommand("dataset", "Batch-blur every LF in a directory");
    struct {
        std::string sharp_dir, out;
        std::string mode = "literal_eq13";
        int motions = 1;
        int n_time = 32;
        uint64_t seed = 0;
        BoundsFlags bounds;
    } ds;
    dataset->add_option("--sharp-dir", ds.sharp_dir, "Directory of sharp LF subdirectories")->required();
    dataset->add_option("--motions", ds.motions, "Unique camera motions per sharp LF")->check(CLI::PositiveNumber);
    dataset->add_option("--n-time", ds.n_time, "Number of integration time samples");
    dataset->add_option("--seed", ds.seed, "Master seed");
    dataset->add_option("--mode", ds.mode, "Warp mode");
    dataset->add_option("--out", ds.out, "Output directory")->required();
    ds.bounds.add_to(dataset);

    // train
    auto* train_cmd = app.add_subcommand("train", "Train the recurrent deblurring network");
    struct {
        std::string dataset_dir, out;
        std::string train_config, net_config;
        int iterations = -1, patch = -1, angular = -1;
        double lr = -1, lambda = -1;
        int64_t seed = -1;
        int blocks = -1, channels = -1, hidden = -1, radius = -1;
    } tr;
    train_cmd->add_option("--dataset", tr.dataset_dir, "Dataset directory containing dataset.json")->required();
    train_cmd->add_option("--train-config", tr.train_config, "TrainConfig JSON file");
    train_cmd->add_option("--net-config", tr.net_config, "NetworkConfig JSON file");
    train_cmd->add_option("--iterations", tr.iterations, "Training iterations (overrides config file)");
    train_cmd->add_option("--patch", tr.patch, "Square patch size");
    train_cmd->add_option("--angular-samples", tr.angular, "Views n sampled per pass");
    train_cmd->add_option("--lr", tr.lr, "ADAM learning rate");
    train_cmd->add_option("--lambda", tr.lambda, "Weight regularization lambda");
    train_cmd->add_option("--seed", tr.seed, "Training seed (also the parameter init seed)");
    train_cmd->add_option("--blocks", tr.blocks, "Residual block count");
    train_cmd->add_option("--channels", tr.channels, "Base channel width C");
    train_cmd->add_option("--hidden", tr.hidden, "Hidden state channels C_h");
    train_cmd->add_option("--radius", tr.radius, "Temporal radius b");
    train_cmd->add_option("--out", tr.out, "Output directory")->required();

    // infer
    auto* infer = app.add_subcommand("infer", "Deblur one light field with a checkpoint");
    struct {
        std::string lf, checkpoint, out;
    } in_args;
    infer->add_option("--lf", in_args.lf, "Blurred light-field directory")->required();
    infer->add_option("--checkpoint", in_args.checkpoint, "Network checkpoint")->required();
    infer->add_option("--out", in_args.out, "Output light-field directory")->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "PSNR/SSIM/RMSE report between two light fields");
    struct {
        std::string pred, ref, out, csv;
    } ev;
    eval_cmd->add_option("--pred", ev.pred, "Predicted/restored LF directory")->required();
    eval_cmd->add_option("--ref", ev.ref, "Reference (ground truth) LF directory")->required();
    eval_cmd->add_option("--out", ev.out, "Report JSON path")->required();
    eval_cmd->add_option("--csv", ev.csv, "Optional per-view CSV path");

    // epi
    auto* epi_cmd = app.add_subcommand("epi", "Export an epipolar plane image as PNG");
    struct {
        std::string lf, out;
        std::string axis = "horizontal";
        int spatial = 0, angular = 0;
    } ep;
    epi_cmd->add_option("--lf", ep.lf, "Light-field directory")->required();
    epi_cmd->add_option("--axis", ep.axis, "horizontal (fix y,v) | vertical (fix x,u)");
    epi_cmd->add_option("--spatial", ep.spatial, "Fixed spatial index (row y or column x)");
    epi_cmd->add_option("--angular", ep.angular, "Fixed angular index (v or u)");
    epi_cmd->add_option("--out", ep.out, "Output PNG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        if (*trajgen) {
            const MotionBounds bounds = tg.bounds.resolve();
            fs::create_directories(tg.out);
            uint64_t next = tg.seed;
            for (int i = 0; i < tg.count; ++i) {
                Trajectory t = make_random_trajectory(next, bounds);
                t.n_time_samples = tg.n_time;
                save_trajectory(t, fs::path(tg.out) / ("traj_" + std::to_string(next) + ".json"));
                ++next;
            }
            write_run_config(tg.out, "trajgen",
                             {{"seed", tg.seed},
                              {"count", tg.count},
                              {"n_time_samples", tg.n_time},
                              {"bounds", bounds_to_json(bounds)},
                              {"generator", U53Generator::kName}});
        } else if (*synth) {
            MotionBounds bounds;
            WarpMode mode = warp_mode_from_name(sy.mode);
            uint64_t seed = sy.seed;
            int n_time = sy.n_time;
            if (!sy.job_config.empty()) {
                const auto j = load_json_file(sy.job_config);
                if (j.contains("bounds")) bounds = bounds_from_json(j["bounds"]);
                n_time = j.value("n_time_samples", n_time);
                if (j.contains("warp_mode")) mode = warp_mode_from_name(j["warp_mode"].get<std::string>());
                seed = j.value("seed", seed);
            }
            if (synth->count("--seed")) seed = sy.seed;
            if (synth->count("--n-time")) n_time = sy.n_time;
            if (synth->count("--mode")) mode = warp_mode_from_name(sy.mode);
            if (!sy.bounds.file.empty() || synth->count("--max-p-x") || synth->count("--max-p-y") ||
                synth->count("--max-p-z") || synth->count("--max-phi") || synth->count("--max-theta") ||
                synth->count("--max-psi")) {
                bounds = sy.bounds.resolve();
            }

            BlurJob job;
            job.sharp_path = sy.lf;
            job.trajectory = sy.trajectory.empty() ? make_random_trajectory(seed, bounds)
                                                   : load_trajectory(sy.trajectory);
            job.n_time = n_time;
            job.mode = mode;
            job.blurred_out = fs::path(sy.out) / "blurred";
            job.ground_truth_out = fs::path(sy.out) / "ground_truth";
            job.manifest_out = fs::path(sy.out) / "job.json";
            fs::create_directories(sy.out);
            run_blur_job(job);
            write_run_config(sy.out, "synth",
                             {{"lf", sy.lf},
                              {"trajectory", sy.trajectory},
                              {"seed", seed},
                              {"n_time_samples", n_time},
                              {"warp_mode", warp_mode_name(mode)},
                              {"bounds", bounds_to_json(job.trajectory.bounds)}});
        } else if (*dataset) {
            const MotionBounds bounds = ds.bounds.resolve();
            const WarpMode mode = warp_mode_from_name(ds.mode);
            generate_dataset(ds.sharp_dir, ds.motions, bounds, ds.n_time, ds.seed, ds.out, mode);
            write_run_config(ds.out, "dataset",
                             {{"sharp_dir", ds.sharp_dir},
                              {"motions", ds.motions},
                              {"n_time_samples", ds.n_time},
                              {"seed", ds.seed},
                              {"warp_mode", warp_mode_name(mode)},
                              {"bounds", bounds_to_json(bounds)},
                              {"generator", U53Generator::kName}});
        } else if (*train_cmd) {
            net::TrainConfig tc;
            if (!tr.train_config.empty()) tc = net::TrainConfig::from_json(load_json_file(tr.train_config));
            if (tr.iterations >= 0) tc.iterations = tr.iterations;
            if (tr.patch >= 0) tc.patch = tr.patch;
            if (tr.angular >= 0) tc.angular_samples = tr.angular;
            if (tr.lr >= 0) tc.learning_rate = tr.lr;
            if (tr.lambda >= 0) tc.lambda = tr.lambda;
            if (tr.seed >= 0) tc.seed = static_cast<uint64_t>(tr.seed);

            net::NetworkConfig nc;
            if (!tr.net_config.empty()) nc = net::NetworkConfig::from_json(load_json_file(tr.net_config));
            if (tr.blocks >= 0) nc.num_blocks = tr.blocks;
            if (tr.channels >= 0) nc.base_channels = tr.channels;
            if (tr.hidden >= 0) nc.hidden_channels = tr.hidden;
            if (tr.radius >= 0) nc.temporal_radius = tr.radius;
            if (tr.seed >= 0) nc.init_seed = static_cast<uint64_t>(tr.seed);
            nc.validate();

            const DatasetManifest manifest =
                load_dataset_manifest(fs::path(tr.dataset_dir) / DatasetManifest::kFileName);
            net::TrainResult result = net::train(manifest, tr.dataset_dir, tc, nc);
            fs::create_directories(tr.out);
            net::save_checkpoint(result.net, fs::path(tr.out) / "checkpoint.lfnet");
            net::write_train_log(result.log, fs::path(tr.out) / "train_log.jsonl");
            write_run_config(tr.out, "train",
                             {{"dataset", tr.dataset_dir},
                              {"train_config", tc.to_json()},
                              {"network_config", nc.to_json()}});
        } else if (*infer) {
            const LightField lf = load_lightfield(in_args.lf);
            const net::Network<float> network = net::load_checkpoint(in_args.checkpoint);
            const LightField restored = net::deblur_lightfield(lf, network);
            save_lightfield(restored, in_args.out);
            write_run_config(in_args.out, "infer",
                             {{"lf", in_args.lf},
                              {"checkpoint", in_args.checkpoint},
                              {"network_config", network.config().to_json()}});
        } else if (*eval_cmd) {
            const LightField pred = load_lightfield(ev.pred);
            const LightField ref = load_lightfield(ev.ref);
            if (!fs::path(ev.out).parent_path().empty()) fs::create_directories(fs::path(ev.out).parent_path());
            if (!ev.csv.empty() && !fs::path(ev.csv).parent_path().empty()) {
                fs::create_directories(fs::path(ev.csv).parent_path());
            }
            EvalReport report = evaluate_lf(pred, ref);
            report.predicted_id = ev.pred;
            report.reference_id = ev.ref;
            save_eval_report(report, ev.out);
            if (!ev.csv.empty()) save_eval_report_csv(report, ev.csv);
            std::cout << "mean psnr " << report.mean_psnr << " dB, ssim " << report.mean_ssim << ", rmse "
                      << report.mean_rmse << "\n";
            write_run_config(fs::path(ev.out).parent_path().empty() ? fs::path(".")
                                                                    : fs::path(ev.out).parent_path(),
                             "eval", {{"pred", ev.pred}, {"ref", ev.ref}, {"out", ev.out}, {"csv", ev.csv}});
        } else if (*epi_cmd) {
            const LightField lf = load_lightfield(ep.lf);
            EpiAxis axis;
            if (ep.axis == "horizontal") {
                axis = EpiAxis::horizontal;
            } else if (ep.axis == "vertical") {
                axis = EpiAxis::vertical;
            } else {
                std::cerr << "epi: --axis must be horizontal or vertical, got '" << ep.axis << "'\n";
                return 1;
            }
            const Image epi = extract_epi(lf, axis, ep.spatial, ep.angular);
            if (!fs::path(ep.out).parent_path().empty()) fs::create_directories(fs::path(ep.out).parent_path());
            save_image_png(epi, ep.out);
            write_run_config(fs::path(ep.out).parent_path().empty() ? fs::path(".")
                                                                    : fs::path(ep.out).parent_path(),
                             "epi",
                             {{"lf", ep.lf}, {"axis", ep.axis}, {"spatial", ep.spatial}, {"angular", ep.angular}});
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "lfdeblur: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "lfdeblur: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
