#include <CLI11.hpp>

#include <iostream>

#include "ecolens/commands.hpp"

using namespace ecolens;

int main(int argc, char** argv) {
    CLI::App app{"EcoLens: energy-aware video-processing configuration control"};
    app.require_subcommand(1);

    // profile ---------------------------------------------------------------
    cmd::ProfileOptions profile;
    profile.scene_file = "data/default_scene.json";
    auto* p = app.add_subcommand("profile", "write the full offline configuration profile");
    p->add_option("--scene", profile.scene_file, "scene parameter file")
        ->capture_default_str();
    p->add_option("--regime", profile.regime, "regime mix p (0 = day, 1 = night)")
        ->capture_default_str();
    p->add_option("--out", profile.out_csv, "output CSV path")->required();

    // run ---------------------------------------------------------------------
    cmd::RunOptions run;
    run.scene_file = "data/default_scene.json";
    run.out_dir = cmd::default_out_dir();
    bool no_plot = false;
    auto* r = app.add_subcommand("run", "run the online verify/explore/exploit loop");
    r->add_option("--scene", run.scene_file, "scene parameter file")->capture_default_str();
    r->add_option("--out", run.out_dir, "output directory")->capture_default_str();
    r->add_option("--target", run.params.target_accuracy, "accuracy target")
        ->capture_default_str();
    r->add_option("--total", run.params.total_duration_s, "total simulated seconds")
        ->capture_default_str();
    r->add_option("--explore", run.params.explore_duration_s, "explore seconds per round")
        ->capture_default_str();
    r->add_option("--exploit", run.params.exploit_duration_s, "exploit seconds per round")
        ->capture_default_str();
    r->add_option("--window", run.params.window_capacity, "sliding window capacity")
        ->capture_default_str();
    r->add_option("--manual", run.params.n_manual, "manual picks per explore round")
        ->capture_default_str();
    r->add_option("--mbo", run.params.n_mbo, "MBO picks per explore round")
        ->capture_default_str();
    auto* run_seed = r->add_option("--seed", run.params.seed, "RNG seed (default: scene file)");
    r->add_flag("--no-plot", no_plot, "skip the SVG plot");
    r->callback([&] { run.seed_overridden = run_seed->count() > 0; });

    // eval ----------------------------------------------------------------
    cmd::EvalOptions eval;
    std::string feature_name = "pixel";
    auto* e = app.add_subcommand("eval", "filter a frame corpus and score detection tracks");
    e->add_option("--frames", eval.frames_dir, "directory of P5 .pgm frames")->required();
    e->add_option("--gt", eval.gt_detections, "ground-truth detections JSONL")->required();
    e->add_option("--kept", eval.kept_detections, "degraded detections JSONL")->required();
    e->add_option("--feature", feature_name, "pixel | area | edge")->capture_default_str();
    e->add_option("--threshold", eval.threshold, "filter threshold")->capture_default_str();
    e->add_option("--area-change", eval.area_change_threshold,
                  "per-pixel change threshold for the area feature")
        ->capture_default_str();
    e->add_option("--edge-binarize", eval.edge_binarize_level,
                  "gradient binarization level for the edge feature")
        ->capture_default_str();
    e->add_option("--report", eval.report_path, "also write the JSON report here");

    // pareto -----------------------------------------------------------------
    cmd::ParetoOptions pareto;
    auto* pf = app.add_subcommand("pareto", "extract the Pareto front from a profile CSV");
    pf->add_option("--profile", pareto.profile_csv, "profile CSV")->required();
    pf->add_option("--out", pareto.out_csv, "output CSV path")->required();

    // serve ----------------------------------------------------------------
    cmd::ServeOptions serve;
    serve.scene_file = "data/default_scene.json";
    serve.out_dir = cmd::default_out_dir();
    auto* s = app.add_subcommand("serve", "run the edge-server agent for one camera");
    s->add_option("--port", serve.port, "TCP port (0 = ephemeral)")->capture_default_str();
    s->add_option("--scene", serve.scene_file, "scene parameter file")->capture_default_str();
    s->add_option("--out", serve.out_dir, "output directory")->capture_default_str();
    s->add_option("--target", serve.params.target_accuracy, "accuracy target")
        ->capture_default_str();
    s->add_option("--total", serve.params.total_duration_s, "total simulated seconds")
        ->capture_default_str();
    auto* serve_seed = s->add_option("--seed", serve.params.seed, "RNG seed");
    s->callback([&] { serve.seed_overridden = serve_seed->count() > 0; });

    // camera ----------------------------------------------------------------
    cmd::CameraOptionsCli camera;
    auto* c = app.add_subcommand("camera", "run the camera agent");
    c->add_option("--host", camera.host, "server host")->capture_default_str();
    c->add_option("--port", camera.port, "server port")->capture_default_str();
    c->add_option("--frames", camera.frames_dir, "PGM directory (default: synthetic frames)");
    c->add_option("--threshold", camera.threshold, "initial filter threshold")
        ->capture_default_str();
    c->add_option("--bitrate", camera.bitrate_kbps, "initial bitrate (kbps)")
        ->capture_default_str();
    c->add_option("--seed", camera.seed, "synthetic frame seed")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (p->parsed()) return cmd::cmd_profile(profile);
    if (r->parsed()) {
        run.write_plot = !no_plot;
        return cmd::cmd_run(run);
    }
    if (e->parsed()) {
        try {
            eval.feature = filter_feature_from_string(feature_name);
        } catch (const std::exception& ex) {
            std::cerr << "ecolens: " << ex.what() << "\n";
            return 1;
        }
        return cmd::cmd_eval(eval);
    }
    if (pf->parsed()) return cmd::cmd_pareto(pareto);
    if (s->parsed()) return cmd::cmd_serve(serve);
    if (c->parsed()) return cmd::cmd_camera(camera);
    return 1;
}
