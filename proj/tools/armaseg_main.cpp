// Copyright 2026 The armaseg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// armaseg command-line tool: segment one image, evaluate a directory, or
// generate synthetic benchmark data.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "armaseg/arma_net.hpp"
#include "armaseg/config.hpp"
#include "armaseg/dataset.hpp"
#include "armaseg/errors.hpp"
#include "armaseg/pipeline.hpp"
#include "armaseg/synthetic.hpp"

namespace {

using armaseg::KeyValues;

// Settings given on the command line, keyed like the config file.
struct Overrides {
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
};

void add_setting_options(CLI::App* app, Overrides& o) {
  const std::pair<const char*, const char*> valued[] = {
      {"tau", "Similarity threshold in (0, 1)"},
      {"activation", "relu, gelu, silu or selu"},
      {"epochs", "Training epochs"},
      {"seed", "Random seed"},
      {"lr", "Learning rate"},
      {"weight-decay", "Decoupled weight decay"},
      {"lr-decay", "Per-epoch learning-rate factor (1 = constant)"},
      {"stacks", "Parallel ARMA stacks"},
      {"layers", "Layers per stack"},
      {"hidden", "Hidden width (0 = input width)"},
      {"head-hidden", "Width of the clustering head"},
      {"arch", "arma or gcn"},
      {"clusters", "Number of clusters"},
      {"patch", "Patch size in pixels"},
      {"threads", "Worker threads for directory evaluation"},
      {"shared-weights", "Share layer weights within a stack (true/false)"},
      {"activate-last", "Apply the activation after the last layer (true/false)"},
      {"allow-self-loops", "Keep i == i edges (true/false)"},
  };
  for (const auto& [name, help] : valued) {
    app->add_option(std::string("--") + name, o.values[name], help);
  }
  const std::pair<const char*, const char*> switches[] = {
      {"no-refine", "Skip the 3x3 majority filter"},
      {"soft-upsample", "Bilinear upsampling of soft assignments"},
      {"losscurve", "Write <stem>.loss.csv"},
  };
  for (const auto& [name, help] : switches) {
    app->add_flag(std::string("--") + name, o.flags[name], help);
  }
}

// Config file first, command line on top.
armaseg::SegConfig resolve_config(CLI::App* app, const Overrides& o,
                                  KeyValues file_values) {
  for (const auto& [name, value] : o.values) {
    if (app->count("--" + name) > 0) file_values[name] = value;
  }
  for (const auto& [name, set] : o.flags) {
    if (app->count("--" + name) > 0) file_values[name] = set ? "true" : "false";
  }
  armaseg::SegConfig cfg;
  armaseg::apply_settings(cfg, file_values);
  cfg.validate();
  return cfg;
}

// Takes a job-level key out of the config file values.
std::optional<std::string> take(KeyValues& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) return std::nullopt;
  std::string v = it->second;
  kv.erase(it);
  return v;
}

// "HxW", e.g. 224x224.
void parse_size(const std::string& text, int& height, int& width) {
  const auto x = text.find_first_of("xX");
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used_h = 0;
    std::size_t used_w = 0;
    height = std::stoi(text.substr(0, x), &used_h);
    width = std::stoi(text.substr(x + 1), &used_w);
    if (used_h != x || used_w != text.size() - x - 1 || height < 1 || width < 1) {
      throw std::invalid_argument(text);
    }
  } catch (const std::exception&) {
    throw armaseg::ConfigError("--size expects HEIGHTxWIDTH, got '" + text + "'");
  }
}

int run_segment(CLI::App* app, const Overrides& o, const std::string& features,
                const std::string& size, const std::string& gt,
                const std::string& config_path, const std::string& save_model,
                const std::string& out_dir) {
  KeyValues kv = config_path.empty() ? KeyValues{}
                                     : armaseg::read_key_value_file(config_path);
  armaseg::SegJob job;
  const auto file_features = take(kv, "features");
  job.features_path = features.empty() ? file_features.value_or("") : features;
  const auto file_size = take(kv, "size");
  const auto file_gt = take(kv, "gt");
  const auto file_out = take(kv, "output");
  if (job.features_path.empty()) throw armaseg::ConfigError("--features is required");
  const std::string size_text = size.empty() ? file_size.value_or("") : size;
  if (!size_text.empty()) parse_size(size_text, job.height, job.width);
  if (!gt.empty()) {
    job.gt_path = gt;
  } else if (file_gt) {
    job.gt_path = *file_gt;
  }
  const std::string out = out_dir.empty() ? file_out.value_or("") : out_dir;
  if (out.empty()) throw armaseg::ConfigError("-o/--output is required");
  job.config = resolve_config(app, o, kv);

  const armaseg::SegResult result = armaseg::run_image(job);
  armaseg::write_outputs(job, result, out);
  if (!save_model.empty()) armaseg::save_model(result.model, save_model);

  const auto& m = result.mask;
  std::printf("%s: %dx%d mask, %zu foreground pixels, %.2fs\n", job.stem().c_str(),
              m.width, m.height, m.foreground_count(), result.seconds);
  if (m.meta.trivial_partition) {
    std::printf("warning: all patches fell into one cluster\n");
  }
  if (result.iou) {
    std::printf("mIoU %.4f (oracle-flip diagnostic %.4f)\n", result.iou->miou,
                *result.oracle_flip_miou);
  }
  return 0;
}

int run_evaluate(CLI::App* app, const Overrides& o, const std::string& features_dir,
                 const std::string& gt_dir, const std::string& config_path,
                 const std::string& out_dir, bool save_masks) {
  KeyValues kv = config_path.empty() ? KeyValues{}
                                     : armaseg::read_key_value_file(config_path);
  const auto file_fdir = take(kv, "features-dir");
  const auto file_gdir = take(kv, "gt-dir");
  const auto file_out = take(kv, "output");
  const std::string fdir = features_dir.empty() ? file_fdir.value_or("") : features_dir;
  const std::string gdir = gt_dir.empty() ? file_gdir.value_or("") : gt_dir;
  const std::string out = out_dir.empty() ? file_out.value_or("") : out_dir;
  if (fdir.empty() || gdir.empty()) {
    throw armaseg::ConfigError("--features-dir and --gt-dir are required");
  }
  if (out.empty()) throw armaseg::ConfigError("-o/--output is required");
  const armaseg::SegConfig cfg = resolve_config(app, o, kv);

  std::optional<std::string> mask_dir;
  if (save_masks) mask_dir = (std::filesystem::path(out) / "masks").string();
  const armaseg::DatasetReport report =
      armaseg::evaluate_dataset(fdir, gdir, cfg, mask_dir);
  armaseg::write_report(report, out);

  std::printf("%zu images, mean mIoU %.4f (oracle-flip diagnostic %.4f), %.2fs total\n",
              report.images.size(), report.mean_miou, report.mean_oracle_flip_miou,
              report.total_seconds);
  for (const std::string& path : report.unmatched) {
    std::fprintf(stderr, "warning: no partner for %s\n", path.c_str());
  }
  for (const auto& f : report.failed) {
    std::fprintf(stderr, "warning: %s failed: %s\n", f.stem.c_str(), f.message.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised segmentation by modularity-trained ARMA graph networks"};
  app.require_subcommand(1);

  // segment
  Overrides seg_o;
  std::string features, size, gt, seg_config, save_model, seg_out;
  CLI::App* seg = app.add_subcommand("segment", "Segment one feature file");
  seg->add_option("--features", features, "UFV1 feature file");
  seg->add_option("--size", size, "Output mask size HEIGHTxWIDTH");
  seg->add_option("--gt", gt, "Ground-truth mask (PGM or PNG) for IoU");
  seg->add_option("--config", seg_config, "key = value config file");
  seg->add_option("--save-model", save_model, "Write the trained model checkpoint");
  seg->add_option("-o,--output", seg_out, "Output directory");
  add_setting_options(seg, seg_o);

  // evaluate
  Overrides eval_o;
  std::string features_dir, gt_dir, eval_config, eval_out;
  bool save_masks = false;
  CLI::App* eval = app.add_subcommand("evaluate", "Evaluate a directory of feature files");
  eval->add_option("--features-dir", features_dir, "Directory of <stem>.ufv files");
  eval->add_option("--gt-dir", gt_dir, "Directory of <stem>.pgm/.png masks");
  eval->add_option("--config", eval_config, "key = value config file");
  eval->add_flag("--save-masks", save_masks, "Also write per-image outputs to <out>/masks");
  eval->add_option("-o,--output", eval_out, "Report directory");
  add_setting_options(eval, eval_o);

  // synth
  std::string kind = "blob";
  std::uint64_t seed = 0;
  int count = 1;
  std::string synth_out;
  armaseg::BlobParams blob;
  armaseg::SbmParams sbm;
  CLI::App* synth = app.add_subcommand("synth", "Generate synthetic benchmark data");
  synth->add_option("--kind", kind, "blob or sbm")->check(CLI::IsMember({"blob", "sbm"}));
  synth->add_option("--seed", seed, "First seed");
  synth->add_option("--count", count, "Number of samples (seeds seed..seed+count-1)")
      ->check(CLI::PositiveNumber);
  synth->add_option("-o,--output", synth_out, "Output directory")->required();
  synth->add_option("--grid", blob.grid, "blob: grid side in patches");
  synth->add_option("--side", blob.side, "blob: square side in patches");
  synth->add_option("--dims", blob.dims, "blob: feature dimension");
  synth->add_option("--theta", blob.theta_deg, "blob: prototype angle in degrees");
  synth->add_option("--sigma", blob.sigma, "Noise standard deviation");
  synth->add_option("--patch", blob.patch, "blob: patch size in pixels");
  synth->add_option("--blocks", sbm.blocks, "sbm: number of blocks");
  synth->add_option("--block-size", sbm.block_size, "sbm: nodes per block");
  synth->add_option("--p-in", sbm.p_in, "sbm: within-block edge probability");
  synth->add_option("--p-out", sbm.p_out, "sbm: between-block edge probability");

  CLI11_PARSE(app, argc, argv);

  try {
    if (seg->parsed()) {
      return run_segment(seg, seg_o, features, size, gt, seg_config, save_model, seg_out);
    }
    if (eval->parsed()) {
      return run_evaluate(eval, eval_o, features_dir, gt_dir, eval_config, eval_out,
                          save_masks);
    }
    if (synth->count("--sigma") > 0) sbm.sigma = blob.sigma;
    for (int i = 0; i < count; ++i) {
      const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
      const std::string stem = kind + "_" + std::to_string(s);
      if (kind == "blob") {
        armaseg::write_blob(armaseg::generate_blob(blob, s), synth_out, stem);
      } else {
        armaseg::write_sbm(armaseg::generate_sbm(sbm, s), synth_out, stem);
      }
    }
    std::printf("wrote %d %s sample(s) to %s\n", count, kind.c_str(), synth_out.c_str());
    return 0;
  } catch (const armaseg::ConfigError& e) {
    std::fprintf(stderr, "armaseg: configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "armaseg: error: %s\n", e.what());
    return 1;
  }
}
