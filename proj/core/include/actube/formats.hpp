// Line-oriented JSON interchange formats (UTF-8, one object per line).
//
//   detections:   {"video_id", "frame", "boxes": [{"x","y","w","h","conf","ac","bg"}]}
//   ground truth: {"video_id", "class", "start", "end", "boxes": [{"x","y","w","h"}]}
//   proposals:    {"video_id", "start", "end", "score",
//                  "boxes": [{"x","y","w","h","conf","ac","bg"}]}
//   features:     {"video_id", "frame", "features": [...]}
//
// Detection and feature records may appear in any order but every video must
// have frames 0..T-1 exactly once. Writers emit videos sorted by id.
// See docs/formats.md.

#ifndef ACTUBE_FORMATS_HPP_
#define ACTUBE_FORMATS_HPP_

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "actube/geometry.hpp"
#include "actube/neural_head.hpp"
#include "actube/tube_metrics.hpp"

namespace actube {

// A malformed input record. line is 1-based; 0 when the error concerns the
// file as a whole.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::string file, std::size_t line, std::string field,
              const std::string& message);

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }
  const std::string& detail() const { return detail_; }

  // {"error":"format","file":...,"line":...,"field":...,"message":...}
  std::string to_json() const;

 private:
  std::string file_;
  std::size_t line_;
  std::string field_;
  std::string detail_;
};

struct Proposal {
  std::string video_id;
  TubePath path;
  double score = 0.0;

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

struct VideoFeatures {
  std::string video_id;
  std::vector<Vector> frames;

  friend bool operator==(const VideoFeatures&, const VideoFeatures&) = default;
};

using GroundTruthSet = std::map<std::string, std::vector<GroundTruthTube>>;

// Readers take the text plus a name used in error records.
std::vector<VideoDetections> parse_detections(const std::string& text,
                                              const std::string& file);
GroundTruthSet parse_ground_truth(const std::string& text,
                                  const std::string& file);
std::vector<Proposal> parse_proposals(const std::string& text,
                                      const std::string& file);
std::vector<VideoFeatures> parse_features(const std::string& text,
                                          const std::string& file);

std::string format_detections(std::vector<VideoDetections> videos);
std::string format_ground_truth(const GroundTruthSet& gts);
std::string format_proposals(const std::vector<Proposal>& proposals);
std::string format_features(std::vector<VideoFeatures> videos);
std::string format_report(const MetricsReport& report);

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

inline std::vector<VideoDetections> load_detections(const std::string& path) {
  return parse_detections(read_file(path), path);
}
inline GroundTruthSet load_ground_truth(const std::string& path) {
  return parse_ground_truth(read_file(path), path);
}
inline std::vector<Proposal> load_proposals(const std::string& path) {
  return parse_proposals(read_file(path), path);
}
inline std::vector<VideoFeatures> load_features(const std::string& path) {
  return parse_features(read_file(path), path);
}

}  // namespace actube

#endif  // ACTUBE_FORMATS_HPP_
