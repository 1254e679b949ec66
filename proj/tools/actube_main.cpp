// actube: command-line front end for synthetic data, toy training,
// inference, linking, trimming and evaluation.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "actube/config.hpp"
#include "actube/formats.hpp"
#include "actube/model.hpp"
#include "actube/pipeline.hpp"
#include "actube/synthetic.hpp"
#include "actube/training.hpp"

namespace {

using namespace actube;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o, const std::string& out_help) {
  cmd->add_option("--config", o.config_path, "Pipeline configuration (JSON)");
  cmd->add_option("--seed", o.seed, "Override the configuration seed");
  cmd->add_option("--out", o.out, out_help)->required();
  cmd->add_option("--threads", o.threads, "Maximum worker threads")
      ->check(CLI::PositiveNumber);
}

PipelineConfig resolve_config(const CommonOptions& o) {
  PipelineConfig c = o.config_path.empty() ? PipelineConfig{}
                                           : load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  return c;
}

std::filesystem::path ensure_dir(const std::string& dir) {
  std::filesystem::create_directories(dir);
  return std::filesystem::path(dir);
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::vector<VideoDetections> detections_from_model(const std::string& checkpoint,
                                                   const std::string& features,
                                                   int threads) {
  return infer_all(load_checkpoint(checkpoint), load_features(features), threads);
}

int run_synth(const CommonOptions& o, std::optional<int> videos,
              const std::string& prefix) {
  PipelineConfig c = resolve_config(o);
  const int count = videos.value_or(c.synthetic.videos);
  const auto data = generate_dataset(c.synthetic, c.model.feature_side, count,
                                     c.seed, prefix);
  std::vector<VideoFeatures> features;
  std::vector<VideoDetections> oracle;
  GroundTruthSet gts;
  for (const SyntheticVideo& v : data) {
    features.push_back({v.video_id, v.features});
    oracle.push_back(v.oracle);
    gts[v.video_id].push_back(v.gt);
  }
  const auto dir = ensure_dir(o.out);
  write_file((dir / "features.jsonl").string(), format_features(features));
  write_file((dir / "detections.jsonl").string(), format_detections(oracle));
  write_file((dir / "gt.jsonl").string(), format_ground_truth(gts));
  std::cout << "wrote " << count << " videos to " << dir.string() << "\n";
  return 0;
}

int run_train(const CommonOptions& o, const std::string& features_path,
              const std::string& gt_path, std::optional<int> videos,
              bool quiet) {
  PipelineConfig c = resolve_config(o);
  std::vector<TrainingVideo> train_set;
  if (!features_path.empty()) {
    if (gt_path.empty()) throw std::invalid_argument("--features needs --gt");
    train_set = training_videos(load_features(features_path),
                                load_ground_truth(gt_path));
  } else {
    const int count = videos.value_or(c.synthetic.videos);
    for (const SyntheticVideo& v : generate_dataset(
             c.synthetic, c.model.feature_side, count, c.seed, "train")) {
      train_set.push_back(to_training_video(v));
    }
  }
  const Model model = train(train_set, c, [&](const EpochStats& s) {
    if (!quiet) {
      std::cout << "epoch " << s.epoch << " lr " << s.learning_rate
                << " loss " << s.mean_loss << "\n";
    }
  });
  write_file(o.out, format_checkpoint(model));
  return 0;
}

int run_infer(const CommonOptions& o, const std::string& checkpoint,
              const std::string& features) {
  write_file(o.out,
             format_detections(detections_from_model(checkpoint, features, o.threads)));
  return 0;
}

int run_link(const CommonOptions& o, const std::string& detections,
             const std::string& detections2) {
  PipelineConfig c = resolve_config(o);
  c.trim_enabled = false;
  PipelineInputs in;
  in.primary = load_detections(detections);
  if (!detections2.empty()) in.secondary = load_detections(detections2);
  const PipelineResult r = run_pipeline(c, in, o.threads);
  print_warnings(r.warnings);
  write_file(o.out, format_proposals(r.proposals));
  return 0;
}

int run_trim(const CommonOptions& o, const std::string& paths) {
  const PipelineConfig c = resolve_config(o);
  write_file(o.out, format_proposals(trim_proposals(load_proposals(paths), c)));
  return 0;
}

int run_eval(const CommonOptions& o, const std::string& proposals,
             const std::string& gt) {
  const MetricsReport r = evaluate_proposals(
      load_proposals(proposals), load_ground_truth(gt), default_thresholds());
  write_file(o.out, format_report(r));
  return 0;
}

struct PipelineSources {
  std::string detections, detections2;
  std::string checkpoint, features, checkpoint2, features2;
  std::string gt;
  bool no_trim = false;
};

int run_pipeline_cmd(const CommonOptions& o, const PipelineSources& s) {
  PipelineConfig c = resolve_config(o);
  if (s.no_trim) c.trim_enabled = false;
  PipelineInputs in;
  if (!s.detections.empty()) {
    in.primary = load_detections(s.detections);
  } else if (!s.checkpoint.empty() && !s.features.empty()) {
    in.primary = detections_from_model(s.checkpoint, s.features, o.threads);
  } else {
    throw std::invalid_argument(
        "pipeline needs --detections or --checkpoint with --features");
  }
  if (!s.detections2.empty()) {
    in.secondary = load_detections(s.detections2);
  } else if (!s.checkpoint2.empty()) {
    const std::string& f = s.features2.empty() ? s.features : s.features2;
    in.secondary = detections_from_model(s.checkpoint2, f, o.threads);
  }
  if (!s.gt.empty()) in.ground_truth = load_ground_truth(s.gt);

  const PipelineResult r = run_pipeline(c, in, o.threads);
  print_warnings(r.warnings);
  const auto dir = ensure_dir(o.out);
  write_file((dir / "proposals.jsonl").string(), format_proposals(r.proposals));
  if (r.report) {
    write_file((dir / "report.json").string(), format_report(*r.report));
    std::cout << "proposals " << r.proposals.size() << " abo " << r.report->abo
              << " mabo " << r.report->mabo << " recall@0.5 "
              << r.report->recall(0.5) << "\n";
  } else {
    std::cout << "proposals " << r.proposals.size() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatio-temporal action proposals from per-frame detections"};
  app.require_subcommand(1);

  CommonOptions common;
  std::optional<int> videos;
  std::string prefix = "vid";
  std::string features, gt, checkpoint, detections, detections2, paths, proposals;
  bool quiet = false;
  PipelineSources sources;

  auto* synth = app.add_subcommand("synth", "Generate synthetic videos");
  add_common(synth, common, "Output directory");
  synth->add_option("--videos", videos, "Number of videos (default: config)");
  synth->add_option("--prefix", prefix, "Video id prefix");

  auto* train_cmd = app.add_subcommand("train-toy", "Train a regression head");
  add_common(train_cmd, common, "Checkpoint file to write");
  train_cmd->add_option("--features", features, "Training features (JSONL)");
  train_cmd->add_option("--gt", gt, "Training ground truth (JSONL)");
  train_cmd->add_option("--videos", videos,
                        "Synthetic training videos when no files are given");
  train_cmd->add_flag("--quiet", quiet, "Do not print per-epoch losses");

  auto* infer_cmd = app.add_subcommand("infer", "Decode model detections");
  add_common(infer_cmd, common, "Detections file to write");
  infer_cmd->add_option("--checkpoint", checkpoint)->required();
  infer_cmd->add_option("--features", features)->required();

  auto* link_cmd = app.add_subcommand("link", "Link detections into paths");
  add_common(link_cmd, common, "Paths file to write");
  link_cmd->add_option("--detections", detections)->required();
  link_cmd->add_option("--detections2", detections2, "Second stream to fuse");

  auto* trim_cmd = app.add_subcommand("trim", "Trim linked paths");
  add_common(trim_cmd, common, "Proposals file to write");
  trim_cmd->add_option("--paths", paths)->required();

  auto* eval_cmd = app.add_subcommand("eval", "Score proposals");
  add_common(eval_cmd, common, "Report file to write");
  eval_cmd->add_option("--proposals", proposals)->required();
  eval_cmd->add_option("--gt", gt)->required();

  auto* pipe_cmd = app.add_subcommand("pipeline", "Link, trim and evaluate");
  add_common(pipe_cmd, common, "Output directory");
  pipe_cmd->add_option("--detections", sources.detections);
  pipe_cmd->add_option("--detections2", sources.detections2);
  pipe_cmd->add_option("--checkpoint", sources.checkpoint);
  pipe_cmd->add_option("--features", sources.features);
  pipe_cmd->add_option("--checkpoint2", sources.checkpoint2);
  pipe_cmd->add_option("--features2", sources.features2);
  pipe_cmd->add_option("--gt", sources.gt);
  pipe_cmd->add_flag("--no-trim", sources.no_trim, "Skip path trimming");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return run_synth(common, videos, prefix);
    if (train_cmd->parsed()) return run_train(common, features, gt, videos, quiet);
    if (infer_cmd->parsed()) return run_infer(common, checkpoint, features);
    if (link_cmd->parsed()) return run_link(common, detections, detections2);
    if (trim_cmd->parsed()) return run_trim(common, paths);
    if (eval_cmd->parsed()) return run_eval(common, proposals, gt);
    if (pipe_cmd->parsed()) return run_pipeline_cmd(common, sources);
  } catch (const FormatError& e) {
    std::cerr << e.to_json() << "\n";
    return 2;
  } catch (const std::exception& e) {
    nlohmann::ordered_json j;
    j["error"] = "runtime";
    j["message"] = e.what();
    std::cerr << j.dump() << "\n";
    return 1;
  }
  return 1;
}
