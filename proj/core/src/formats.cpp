#include "actube/formats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

namespace actube {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Cursor over one record; every accessor reports the offending field.
class Record {
 public:
  Record(const json& j, const std::string& file, std::size_t line,
         std::string prefix = {})
      : j_(j), file_(file), line_(line), prefix_(std::move(prefix)) {
    if (!j_.is_object()) fail("", "expected a JSON object");
  }

  [[noreturn]] void fail(const std::string& field,
                         const std::string& message) const {
    throw FormatError(file_, line_, prefix_ + field, message);
  }

  const json& get(const char* key) const {
    auto it = j_.find(key);
    if (it == j_.end()) fail(key, "missing field");
    return *it;
  }

  double number(const char* key) const {
    const json& v = get(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(key, "non-finite number");
    return d;
  }

  // Box coordinates must already be normalized.
  double unit(const char* key) const {
    const double d = number(key);
    if (d < 0.0 || d > 1.0) fail(key, "must lie in [0, 1]");
    return d;
  }

  int integer(const char* key) const {
    const json& v = get(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    const auto i = v.get<long long>();
    if (i < 0 || i > 100'000'000) fail(key, "out of range");
    return static_cast<int>(i);
  }

  std::string string(const char* key) const {
    const json& v = get(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  const json& array(const char* key) const {
    const json& v = get(key);
    if (!v.is_array()) fail(key, "expected an array");
    return v;
  }

  Record child(const json& j, const std::string& field) const {
    return Record(j, file_, line_, prefix_ + field + ".");
  }

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  const json& j_;
  const std::string& file_;
  std::size_t line_;
  std::string prefix_;
};

template <class F>
void for_each_record(const std::string& text, const std::string& file, F&& f) {
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(file, number, "", std::string("invalid JSON: ") + e.what());
    }
    f(Record(j, file, number));
  }
}

Box2D read_box(const Record& r) {
  return Box2D{r.unit("x"), r.unit("y"), r.unit("w"), r.unit("h")};
}

ScoredBox read_scored_box(const Record& r) {
  ScoredBox b;
  b.box = read_box(r);
  b.conf = r.number("conf");
  b.ac = r.number("ac");
  b.bg = r.number("bg");
  return b;
}

std::vector<ScoredBox> read_scored_boxes(const Record& r) {
  std::vector<ScoredBox> out;
  const json& arr = r.array("boxes");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(read_scored_box(r.child(arr[i], "boxes[" + std::to_string(i) + "]")));
  }
  return out;
}

ordered_json box_json(const Box2D& b) {
  ordered_json j;
  j["x"] = b.x;
  j["y"] = b.y;
  j["w"] = b.w;
  j["h"] = b.h;
  return j;
}

ordered_json scored_box_json(const ScoredBox& b) {
  ordered_json j = box_json(b.box);
  j["conf"] = b.conf;
  j["ac"] = b.ac;
  j["bg"] = b.bg;
  return j;
}

// Collects per-frame records and assembles contiguous videos.
template <class Frame>
class FrameCollector {
 public:
  void add(const Record& r, const std::string& video, int frame, Frame value) {
    auto& frames = videos_[video];
    if (frames.count(frame) != 0) {
      r.fail("frame", "duplicate frame " + std::to_string(frame) +
                          " for video '" + video + "'");
    }
    frames.emplace(frame, std::move(value));
    last_line_[video] = r.line();
  }

  // Calls emit(video_id, frames in order) per video, sorted by id.
  template <class F>
  void finish(const std::string& file, F&& emit) {
    for (auto& [video, frames] : videos_) {
      int expect = 0;
      for (const auto& [index, value] : frames) {
        if (index != expect) {
          throw FormatError(file, last_line_[video], "frame",
                            "video '" + video + "' is missing frame " +
                                std::to_string(expect));
        }
        ++expect;
      }
      std::vector<Frame> ordered;
      ordered.reserve(frames.size());
      for (auto& [index, value] : frames) ordered.push_back(std::move(value));
      emit(video, std::move(ordered));
    }
  }

 private:
  std::map<std::string, std::map<int, Frame>> videos_;
  std::map<std::string, std::size_t> last_line_;
};

}  // namespace

FormatError::FormatError(std::string file, std::size_t line, std::string field,
                         const std::string& message)
    : std::runtime_error(file + ":" + std::to_string(line) +
                         (field.empty() ? "" : ": field '" + field + "'") +
                         ": " + message),
      file_(std::move(file)),
      line_(line),
      field_(std::move(field)),
      detail_(message) {}

std::string FormatError::to_json() const {
  ordered_json j;
  j["error"] = "format";
  j["file"] = file_;
  j["line"] = line_;
  j["field"] = field_;
  j["message"] = detail_;
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path, 0, "", "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << contents;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<VideoDetections> parse_detections(const std::string& text,
                                              const std::string& file) {
  FrameCollector<std::vector<ScoredBox>> collect;
  for_each_record(text, file, [&](const Record& r) {
    collect.add(r, r.string("video_id"), r.integer("frame"),
                read_scored_boxes(r));
  });
  std::vector<VideoDetections> out;
  collect.finish(file, [&](const std::string& id,
                           std::vector<std::vector<ScoredBox>> frames) {
    VideoDetections v;
    v.video_id = id;
    for (std::size_t t = 0; t < frames.size(); ++t) {
      v.frames.push_back({static_cast<int>(t), std::move(frames[t])});
    }
    out.push_back(std::move(v));
  });
  return out;
}

GroundTruthSet parse_ground_truth(const std::string& text,
                                  const std::string& file) {
  GroundTruthSet out;
  for_each_record(text, file, [&](const Record& r) {
    GroundTruthTube g;
    const std::string id = r.string("video_id");
    g.class_label = r.string("class");
    g.start = r.integer("start");
    g.end = r.integer("end");
    if (g.start > g.end) r.fail("end", "end precedes start");
    const json& arr = r.array("boxes");
    if (arr.size() != static_cast<std::size_t>(g.length())) {
      r.fail("boxes", "expected " + std::to_string(g.length()) + " boxes, got " +
                          std::to_string(arr.size()));
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
      g.boxes.push_back(read_box(r.child(arr[i], "boxes[" + std::to_string(i) + "]")));
    }
    out[id].push_back(std::move(g));
  });
  return out;
}

std::vector<Proposal> parse_proposals(const std::string& text,
                                      const std::string& file) {
  std::vector<Proposal> out;
  for_each_record(text, file, [&](const Record& r) {
    Proposal p;
    p.video_id = r.string("video_id");
    p.path.start = r.integer("start");
    p.path.end = r.integer("end");
    if (p.path.start > p.path.end) r.fail("end", "end precedes start");
    p.score = r.number("score");
    p.path.boxes = read_scored_boxes(r);
    if (p.path.boxes.size() != static_cast<std::size_t>(p.path.length())) {
      r.fail("boxes", "expected " + std::to_string(p.path.length()) +
                          " boxes, got " + std::to_string(p.path.boxes.size()));
    }
    out.push_back(std::move(p));
  });
  return out;
}

std::vector<VideoFeatures> parse_features(const std::string& text,
                                          const std::string& file) {
  FrameCollector<Vector> collect;
  std::map<std::string, std::size_t> dims;
  for_each_record(text, file, [&](const Record& r) {
    const std::string id = r.string("video_id");
    const json& arr = r.array("features");
    Vector v;
    v.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number()) {
        r.fail("features[" + std::to_string(i) + "]", "expected a number");
      }
      v.push_back(arr[i].get<double>());
    }
    auto [it, inserted] = dims.emplace(id, v.size());
    if (!inserted && it->second != v.size()) {
      r.fail("features", "feature length changes within video '" + id + "'");
    }
    collect.add(r, id, r.integer("frame"), std::move(v));
  });
  std::vector<VideoFeatures> out;
  collect.finish(file, [&](const std::string& id, std::vector<Vector> frames) {
    out.push_back({id, std::move(frames)});
  });
  return out;
}

std::string format_detections(std::vector<VideoDetections> videos) {
  std::sort(videos.begin(), videos.end(),
            [](const auto& a, const auto& b) { return a.video_id < b.video_id; });
  std::string out;
  for (const VideoDetections& v : videos) {
    for (const FrameDetections& f : v.frames) {
      ordered_json j;
      j["video_id"] = v.video_id;
      j["frame"] = f.frame_index;
      j["boxes"] = ordered_json::array();
      for (const ScoredBox& b : f.boxes) j["boxes"].push_back(scored_box_json(b));
      out += j.dump();
      out += '\n';
    }
  }
  return out;
}

std::string format_ground_truth(const GroundTruthSet& gts) {
  std::string out;
  for (const auto& [id, tubes] : gts) {
    for (const GroundTruthTube& g : tubes) {
      ordered_json j;
      j["video_id"] = id;
      j["class"] = g.class_label;
      j["start"] = g.start;
      j["end"] = g.end;
      j["boxes"] = ordered_json::array();
      for (const Box2D& b : g.boxes) j["boxes"].push_back(box_json(b));
      out += j.dump();
      out += '\n';
    }
  }
  return out;
}

std::string format_proposals(const std::vector<Proposal>& proposals) {
  std::string out;
  for (const Proposal& p : proposals) {
    ordered_json j;
    j["video_id"] = p.video_id;
    j["start"] = p.path.start;
    j["end"] = p.path.end;
    j["score"] = p.score;
    j["boxes"] = ordered_json::array();
    for (const ScoredBox& b : p.path.boxes) j["boxes"].push_back(scored_box_json(b));
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string format_features(std::vector<VideoFeatures> videos) {
  std::sort(videos.begin(), videos.end(),
            [](const auto& a, const auto& b) { return a.video_id < b.video_id; });
  std::string out;
  for (const VideoFeatures& v : videos) {
    for (std::size_t t = 0; t < v.frames.size(); ++t) {
      ordered_json j;
      j["video_id"] = v.video_id;
      j["frame"] = t;
      j["features"] = v.frames[t];
      out += j.dump();
      out += '\n';
    }
  }
  return out;
}

std::string format_report(const MetricsReport& r) {
  ordered_json j;
  j["abo"] = r.abo;
  j["mabo"] = r.mabo;
  j["abo_per_class"] = ordered_json::object();
  for (const auto& [label, v] : r.abo_per_class) j["abo_per_class"][label] = v;
  j["recall_at"] = ordered_json::object();
  for (const auto& [eta, v] : r.recall_at) j["recall_at"][format_double(eta)] = v;
  j["curve"] = ordered_json::array();
  for (const auto& [eta, v] : r.curve) j["curve"].push_back({eta, v});
  j["num_proposals"] = r.num_proposals;
  j["num_ground_truth"] = r.num_ground_truth;
  return j.dump(2) + "\n";
}

}  // namespace actube
