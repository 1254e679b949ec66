#include "actube/config.hpp"

#include <set>
#include <stdexcept>
#include <type_traits>

#include <nlohmann/json.hpp>

#include "actube/formats.hpp"

namespace actube {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  // Rejects keys that no read()/child() call asked for.
  void done() const {
    for (const auto& [key, value] : j_.items()) {
      if (seen_.count(key) == 0) fail(key, "unknown field");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw FormatError("", 0, path_.empty() ? key : path_ + "." + key, msg);
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) fail(key, "expected a boolean");
      out = it->get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) fail(key, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (it->is_number_unsigned()) {
          out = it->get<T>();
        } else {
          fail(key, "expected a non-negative integer");
        }
      } else {
        out = it->get<T>();
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) fail(key, "expected a number");
      out = it->get<T>();
    } else {
      if (!it->is_string()) fail(key, "expected a string");
      out = it->get<T>();
    }
  }

  Section child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    static const json kEmpty = json::object();
    return Section(it == j_.end() ? kEmpty : *it,
                   path_.empty() ? key : path_ + "." + key);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

std::string_view to_string(HeadKind h) {
  switch (h) {
    case HeadKind::kStatic: return "static";
    case HeadKind::kLstm: return "lstm";
    case HeadKind::kRnn: return "rnn";
  }
  return "static";
}

HeadKind head_from_string(std::string_view s) {
  if (s == "static") return HeadKind::kStatic;
  if (s == "lstm") return HeadKind::kLstm;
  if (s == "rnn") return HeadKind::kRnn;
  throw std::invalid_argument("unknown head '" + std::string(s) + "'");
}

void validate(const PipelineConfig& c) {
  validate(c.grid);
  validate(c.loss);
  validate(c.link);
  validate(c.trim);
  const auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  const TrainSchedule& t = c.train;
  require(t.epochs >= 0, "train.epochs must be >= 0");
  require(t.batch_size >= 1, "train.batch_size must be >= 1");
  require(t.sequence_length >= 1, "train.sequence_length must be >= 1");
  require(t.learning_rate > 0.0 && t.decayed_learning_rate > 0.0,
          "train learning rates must be positive");
  require(t.decay_epoch >= 0, "train.decay_epoch must be >= 0");
  require(c.model.hidden >= 1, "model.hidden must be >= 1");
  require(c.model.feature_side >= 1, "model.feature_side must be >= 1");
  const SyntheticOptions& s = c.synthetic;
  require(s.videos >= 0, "synthetic.videos must be >= 0");
  require(s.length >= 1, "synthetic.length must be >= 1");
  require(s.untrimmed_fraction >= 0.0 && s.untrimmed_fraction <= 1.0,
          "synthetic.untrimmed_fraction must lie in [0, 1]");
  require(s.min_segment >= 1 && s.min_segment <= s.max_segment,
          "synthetic segment bounds must satisfy 1 <= min <= max");
  require(s.noise >= 0.0 && s.max_speed >= 0.0, "synthetic noise/speed must be >= 0");
  require(s.min_size > 0.0 && s.min_size <= s.max_size && s.max_size <= 1.0,
          "synthetic sizes must satisfy 0 < min <= max <= 1");
  require(s.distractors >= 0, "synthetic.distractors must be >= 0");
}

PipelineConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("", 0, "", std::string("invalid JSON: ") + e.what());
  }
  PipelineConfig c;
  {
    Section root(j, "");
    root.read("seed", c.seed);
    {
      Section s = root.child("grid");
      s.read("k", c.grid.k);
      s.read("b", c.grid.b);
      s.done();
    }
    {
      Section s = root.child("loss");
      s.read("lambda_coord", c.loss.lambda_coord);
      s.read("lambda_noobj", c.loss.lambda_noobj);
      s.done();
    }
    {
      Section s = root.child("link");
      s.read("lambda0", c.link.lambda0);
      s.read("max_paths", c.link.max_paths);
      s.done();
    }
    {
      Section s = root.child("trim");
      s.read("enabled", c.trim_enabled);
      s.read("smooth_window", c.trim.smooth_window);
      s.read("neighborhood", c.trim.neighborhood);
      s.done();
    }
    {
      Section s = root.child("train");
      s.read("epochs", c.train.epochs);
      s.read("batch_size", c.train.batch_size);
      s.read("sequence_length", c.train.sequence_length);
      s.read("learning_rate", c.train.learning_rate);
      s.read("decayed_learning_rate", c.train.decayed_learning_rate);
      s.read("decay_epoch", c.train.decay_epoch);
      s.read("mirror", c.train.mirror);
      s.done();
    }
    {
      Section s = root.child("model");
      std::string head(to_string(c.model.head));
      std::string modulation(to_string(c.model.modulation));
      s.read("head", head);
      s.read("hidden", c.model.hidden);
      s.read("modulation", modulation);
      s.read("feature_side", c.model.feature_side);
      try {
        c.model.head = head_from_string(head);
        c.model.modulation = modulation_from_string(modulation);
      } catch (const std::invalid_argument& e) {
        s.fail("head/modulation", e.what());
      }
      s.done();
    }
    {
      Section s = root.child("synthetic");
      s.read("videos", c.synthetic.videos);
      s.read("length", c.synthetic.length);
      s.read("untrimmed_fraction", c.synthetic.untrimmed_fraction);
      s.read("min_segment", c.synthetic.min_segment);
      s.read("max_segment", c.synthetic.max_segment);
      s.read("noise", c.synthetic.noise);
      s.read("max_speed", c.synthetic.max_speed);
      s.read("min_size", c.synthetic.min_size);
      s.read("max_size", c.synthetic.max_size);
      s.read("distractors", c.synthetic.distractors);
      s.done();
    }
    root.done();
  }
  try {
    validate(c);
  } catch (const std::invalid_argument& e) {
    throw FormatError("", 0, "", e.what());
  }
  return c;
}

std::string config_to_json_text(const PipelineConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["grid"] = {{"k", c.grid.k}, {"b", c.grid.b}};
  j["loss"] = {{"lambda_coord", c.loss.lambda_coord},
               {"lambda_noobj", c.loss.lambda_noobj}};
  j["link"] = {{"lambda0", c.link.lambda0}, {"max_paths", c.link.max_paths}};
  j["trim"] = {{"enabled", c.trim_enabled},
               {"smooth_window", c.trim.smooth_window},
               {"neighborhood", c.trim.neighborhood}};
  j["train"] = {{"epochs", c.train.epochs},
                {"batch_size", c.train.batch_size},
                {"sequence_length", c.train.sequence_length},
                {"learning_rate", c.train.learning_rate},
                {"decayed_learning_rate", c.train.decayed_learning_rate},
                {"decay_epoch", c.train.decay_epoch},
                {"mirror", c.train.mirror}};
  j["model"] = {{"head", std::string(to_string(c.model.head))},
                {"hidden", c.model.hidden},
                {"modulation", std::string(to_string(c.model.modulation))},
                {"feature_side", c.model.feature_side}};
  j["synthetic"] = {{"videos", c.synthetic.videos},
                    {"length", c.synthetic.length},
                    {"untrimmed_fraction", c.synthetic.untrimmed_fraction},
                    {"min_segment", c.synthetic.min_segment},
                    {"max_segment", c.synthetic.max_segment},
                    {"noise", c.synthetic.noise},
                    {"max_speed", c.synthetic.max_speed},
                    {"min_size", c.synthetic.min_size},
                    {"max_size", c.synthetic.max_size},
                    {"distractors", c.synthetic.distractors}};
  return j.dump(2) + "\n";
}

PipelineConfig load_config(const std::string& path) {
  try {
    return config_from_json_text(read_file(path));
  } catch (const FormatError& e) {
    if (!e.file().empty()) throw;
    throw FormatError(path, e.line(), e.field(), e.detail());
  }
}

}  // namespace actube
