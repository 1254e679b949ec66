#include "actube/model.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace actube {
namespace {

constexpr const char* kMagic = "actube-checkpoint";
constexpr int kVersion = 1;

template <class F>
void visit_model(const Model& m, F&& f) {
  if (m.head == HeadKind::kLstm) m.lstm.visit(f);
  if (m.head == HeadKind::kRnn) m.rnn.visit(f);
  m.dense.visit(f);
}

template <class F>
void visit_model(Model& m, F&& f) {
  if (m.head == HeadKind::kLstm) m.lstm.visit(f);
  if (m.head == HeadKind::kRnn) m.rnn.visit(f);
  m.dense.visit(f);
}

class LineReader {
 public:
  LineReader(const std::string& text, const std::string& file)
      : in_(text), file_(file) {}

  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    throw FormatError(file_, line_, field, msg);
  }

  std::vector<std::string> next() {
    std::string line;
    if (!std::getline(in_, line)) {
      ++line_;
      fail("", "unexpected end of file");
    }
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::vector<std::string> words;
    for (std::string w; ss >> w;) words.push_back(w);
    return words;
  }

  // Reads "key value".
  std::string field(const char* key) {
    const auto words = next();
    if (words.size() != 2 || words[0] != key) {
      fail(key, std::string("expected '") + key + " <value>'");
    }
    return words[1];
  }

  template <class T>
  T number(const char* key) {
    const std::string s = field(key);
    return parse<T>(s, key);
  }

  template <class T>
  T parse(const std::string& s, const std::string& key) const {
    T v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      fail(key, "malformed number '" + s + "'");
    }
    return v;
  }

 private:
  std::istringstream in_;
  const std::string& file_;
  std::size_t line_ = 0;
};

}  // namespace

std::size_t Model::input_dim() const {
  switch (head) {
    case HeadKind::kLstm: return lstm.input_dim();
    case HeadKind::kRnn: return rnn.input_dim();
    case HeadKind::kStatic: break;
  }
  return dense.input_dim();
}

std::size_t Model::hidden_dim() const {
  switch (head) {
    case HeadKind::kLstm: return lstm.hidden_dim();
    case HeadKind::kRnn: return rnn.hidden_dim();
    case HeadKind::kStatic: break;
  }
  return 0;
}

Vector Model::parameters() const {
  Vector out;
  visit_model(*this, [&](std::string_view, std::span<const double> a) {
    out.insert(out.end(), a.begin(), a.end());
  });
  return out;
}

void Model::set_parameters(std::span<const double> flat) {
  std::size_t at = 0;
  visit_model(*this, [&](std::string_view, std::span<double> a) {
    if (at + a.size() > flat.size()) {
      throw std::invalid_argument("Model::set_parameters: too few values");
    }
    for (double& v : a) v = flat[at++];
  });
  if (at != flat.size()) {
    throw std::invalid_argument("Model::set_parameters: too many values");
  }
}

Model make_model(const PipelineConfig& config, std::size_t input_dim,
                 std::uint64_t seed) {
  Model m;
  m.head = config.model.head;
  m.seed = seed;
  Rng rng(seed);
  const auto hidden = static_cast<std::size_t>(config.model.hidden);
  switch (m.head) {
    case HeadKind::kStatic:
      m.dense = DenseParams(input_dim, config.grid);
      break;
    case HeadKind::kLstm:
      m.lstm = LstmParams(input_dim, hidden, config.model.modulation);
      init_uniform(m.lstm, rng);
      m.dense = DenseParams(hidden, config.grid);
      break;
    case HeadKind::kRnn:
      m.rnn = RnnParams(input_dim, hidden, hidden);
      init_uniform(m.rnn, rng);
      m.dense = DenseParams(hidden, config.grid);
      break;
  }
  init_uniform(m.dense, rng);
  return m;
}

std::vector<GridTensor> predict(const Model& model,
                                std::span<const Vector> frames) {
  std::vector<GridTensor> out;
  switch (model.head) {
    case HeadKind::kStatic:
      out.reserve(frames.size());
      for (const Vector& x : frames) out.push_back(static_step(model.dense, x));
      break;
    case HeadKind::kLstm:
      out = predict_sequence(model.lstm, model.dense, frames);
      break;
    case HeadKind::kRnn: {
      Vector h(model.rnn.hidden_dim(), 0.0);
      out.reserve(frames.size());
      for (const Vector& x : frames) {
        RnnStepResult r = rnn_step(model.rnn, x, h);
        out.push_back(static_step(model.dense, r.z));
        h = std::move(r.h);
      }
      break;
    }
  }
  return out;
}

VideoDetections infer(const Model& model, const VideoFeatures& video) {
  VideoDetections out;
  out.video_id = video.video_id;
  const std::vector<GridTensor> preds = predict(model, video.frames);
  for (std::size_t t = 0; t < preds.size(); ++t) {
    out.frames.push_back(decode(preds[t], static_cast<int>(t)));
  }
  return out;
}

std::string format_checkpoint(const Model& m) {
  std::string out;
  const auto line = [&](const std::string& key, const std::string& value) {
    out += key;
    out += ' ';
    out += value;
    out += '\n';
  };
  line(kMagic, std::to_string(kVersion));
  line("head", std::string(to_string(m.head)));
  line("modulation", std::string(to_string(m.lstm.modulation)));
  line("input_dim", std::to_string(m.input_dim()));
  line("hidden_dim", std::to_string(m.hidden_dim()));
  line("grid_k", std::to_string(m.grid().k));
  line("grid_b", std::to_string(m.grid().b));
  line("seed", std::to_string(m.seed));
  std::size_t arrays = 0;
  visit_model(m, [&](std::string_view, std::span<const double>) { ++arrays; });
  line("arrays", std::to_string(arrays));
  visit_model(m, [&](std::string_view name, std::span<const double> a) {
    line("array", std::string(name) + " " + std::to_string(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i > 0) out += ' ';
      out += format_double(a[i]);
    }
    out += '\n';
  });
  out += "end\n";
  return out;
}

Model parse_checkpoint(const std::string& text, const std::string& file) {
  LineReader in(text, file);
  const std::string version = in.field(kMagic);
  if (version != std::to_string(kVersion)) {
    in.fail(kMagic, "unsupported checkpoint version '" + version + "'");
  }
  PipelineConfig config;
  Model m;
  try {
    config.model.head = head_from_string(in.field("head"));
    config.model.modulation = modulation_from_string(in.field("modulation"));
  } catch (const std::invalid_argument& e) {
    in.fail("head", e.what());
  }
  const auto input_dim = in.number<std::size_t>("input_dim");
  const auto hidden_dim = in.number<std::size_t>("hidden_dim");
  config.grid.k = in.number<int>("grid_k");
  config.grid.b = in.number<int>("grid_b");
  const auto seed = in.number<std::uint64_t>("seed");
  if (config.grid.k < 1 || config.grid.b < 1) in.fail("grid_k", "grid must be >= 1");
  if (config.model.head != HeadKind::kStatic && hidden_dim < 1) {
    in.fail("hidden_dim", "recurrent head needs hidden_dim >= 1");
  }
  config.model.hidden = static_cast<int>(std::max<std::size_t>(hidden_dim, 1));
  m = make_model(config, input_dim, seed);

  const auto arrays = in.number<std::size_t>("arrays");
  std::size_t seen = 0;
  visit_model(m, [&](std::string_view name, std::span<double> a) {
    ++seen;
    const auto header = in.next();
    if (header.size() != 3 || header[0] != "array" || header[1] != name) {
      in.fail("array", "expected 'array " + std::string(name) + " <count>'");
    }
    if (in.parse<std::size_t>(header[2], "array") != a.size()) {
      in.fail(std::string(name), "expected " + std::to_string(a.size()) + " values");
    }
    const auto values = in.next();
    if (values.size() != a.size()) {
      in.fail(std::string(name), "expected " + std::to_string(a.size()) +
                                     " values, got " + std::to_string(values.size()));
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = in.parse<double>(values[i], std::string(name));
    }
  });
  if (arrays != seen) {
    in.fail("arrays", "expected " + std::to_string(seen) + " arrays");
  }
  const auto tail = in.next();
  if (tail.size() != 1 || tail[0] != "end") in.fail("end", "expected 'end'");
  return m;
}

}  // namespace actube
