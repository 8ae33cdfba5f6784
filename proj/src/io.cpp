#include "divdis/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

namespace divdis::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>((v >> s) & 0xFF));
}

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_floats(std::vector<std::uint8_t>& out, const std::vector<float>& xs) {
  for (float x : xs) put_u32(out, std::bit_cast<std::uint32_t>(x));
}

void get_floats(const std::uint8_t* p, std::size_t count, std::vector<float>& out) {
  out.resize(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::bit_cast<float>(get_u32(p + 4 * i));
}

std::uint64_t payload_bytes(const DdpmHeader& h) {
  const std::uint64_t cells = std::uint64_t{h.n} * h.k;
  return cells * 4 * (h.has_logits() ? 2 : 1);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    out.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

bool parse_int(const std::string& s, long long& out) {
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && first != last;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  in >> out;
  return !in.fail() && in.peek() == std::char_traits<char>::eof();
}

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.is_absolute() ? p : base / p;
}

}  // namespace

// ---------------------------------------------------------------- DDPM

std::vector<std::uint8_t> encode_ddpm(const DdpmFile& file) {
  const std::uint64_t cells = std::uint64_t{file.n} * file.k;
  if (file.n == 0 || file.k == 0) fail(ErrorCode::ZeroDimension, "DDPM needs n, k >= 1");
  if (cells > kMaxCells) fail(ErrorCode::ShapeOverflow, "n*k exceeds 2^31");
  if (file.probs.size() != cells || (file.has_logits() && file.logits.size() != cells)) {
    fail(ErrorCode::ShapeMismatch, "DDPM buffers do not match n*k");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kDdpmHeaderSize + 4 * cells * (file.has_logits() ? 2 : 1));
  out.insert(out.end(), std::begin(kDdpmMagic), std::end(kDdpmMagic));
  put_u16(out, kDdpmVersion);
  put_u16(out, file.has_logits() ? kFlagLogits : 0);
  put_u32(out, file.n);
  put_u32(out, file.k);
  put_floats(out, file.probs);
  if (file.has_logits()) put_floats(out, file.logits);
  return out;
}

DdpmHeader decode_ddpm_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kDdpmHeaderSize) {
    fail(ErrorCode::TruncatedHeader, "file has " + std::to_string(bytes.size()) +
                                         " bytes, header needs 16");
  }
  if (std::memcmp(bytes.data(), kDdpmMagic, 4) != 0) fail(ErrorCode::BadMagic, "not a DDPM file");
  DdpmHeader h;
  h.version = get_u16(bytes.data() + 4);
  h.flags = get_u16(bytes.data() + 6);
  h.n = get_u32(bytes.data() + 8);
  h.k = get_u32(bytes.data() + 12);
  if (h.version != kDdpmVersion) {
    fail(ErrorCode::BadVersion, "unsupported DDPM version " + std::to_string(h.version));
  }
  if ((h.flags & ~kFlagLogits) != 0) {
    fail(ErrorCode::BadFlags, "unknown DDPM flag bits " + std::to_string(h.flags));
  }
  if (h.n == 0 || h.k == 0) fail(ErrorCode::ZeroDimension, "DDPM header has n or k equal to 0");
  if (std::uint64_t{h.n} * h.k > kMaxCells) {
    fail(ErrorCode::ShapeOverflow, "n*k = " + std::to_string(std::uint64_t{h.n} * h.k) +
                                       " exceeds 2^31");
  }
  return h;
}

DdpmFile decode_ddpm(std::span<const std::uint8_t> bytes) {
  const auto h = decode_ddpm_header(bytes);
  const std::uint64_t want = payload_bytes(h);
  const std::uint64_t have = bytes.size() - kDdpmHeaderSize;
  if (have < want) {
    fail(ErrorCode::TruncatedPayload, "payload has " + std::to_string(have) + " bytes, header implies " +
                                          std::to_string(want));
  }
  if (have > want) {
    fail(ErrorCode::TrailingBytes, std::to_string(have - want) + " bytes after the payload");
  }
  DdpmFile f;
  f.n = h.n;
  f.k = h.k;
  const std::size_t cells = std::size_t{h.n} * h.k;
  get_floats(bytes.data() + kDdpmHeaderSize, cells, f.probs);
  if (h.has_logits()) get_floats(bytes.data() + kDdpmHeaderSize + 4 * cells, cells, f.logits);
  return f;
}

DdpmHeader read_ddpm_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::uint8_t buf[kDdpmHeaderSize];
  in.read(reinterpret_cast<char*>(buf), kDdpmHeaderSize);
  try {
    return decode_ddpm_header({buf, static_cast<std::size_t>(in.gcount())});
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

DdpmFile read_ddpm(const fs::path& path) {
  const auto bytes = read_bytes(path);
  try {
    return decode_ddpm(bytes);
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

void write_ddpm(const DdpmFile& file, const fs::path& path) {
  const auto bytes = encode_ddpm(file);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::Io, "short write to " + path.string());
}

DdpmFile to_ddpm(const PredictionSet& set) {
  DdpmFile f;
  f.n = static_cast<std::uint32_t>(set.n_samples());
  f.k = static_cast<std::uint32_t>(set.n_classes());
  f.probs.assign(set.probs().begin(), set.probs().end());
  if (set.has_logits()) f.logits.assign(set.logits().begin(), set.logits().end());
  return f;
}

PredictionSet from_ddpm(const DdpmFile& file, std::string model_id, std::string split_id,
                        std::optional<std::size_t> expected_k) {
  const std::vector<double> probs(file.probs.begin(), file.probs.end());
  std::optional<std::span<const double>> logit_span;
  std::vector<double> logits;
  if (file.has_logits()) {
    logits.assign(file.logits.begin(), file.logits.end());
    logit_span = logits;
  }
  return validate_prediction_set(std::move(model_id), std::move(split_id), file.n, file.k, probs,
                                 logit_span, expected_k);
}

PredictionSet read_predictions(const fs::path& path, std::string model_id, std::string split_id,
                               std::optional<std::size_t> expected_k) {
  const auto file = read_ddpm(path);
  try {
    return from_ddpm(file, std::move(model_id), std::move(split_id), expected_k);
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

void write_predictions(const PredictionSet& set, const fs::path& path) {
  write_ddpm(to_ddpm(set), path);
}

// ---------------------------------------------------------------- labels

LabelVector parse_labels(std::string_view text, std::string split_id) {
  LabelVector out;
  out.split_id = std::move(split_id);
  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto field = trim(lines[i]);
    if (field.empty()) continue;
    if (i == 0 && field == "label") continue;
    long long v = 0;
    if (!parse_int(field, v)) {
      fail(ErrorCode::NonIntegerLabel,
           "split " + out.split_id + " line " + std::to_string(i + 1) + ": '" + field + "'");
    }
    if (v < 0) {
      fail(ErrorCode::NegativeLabel,
           "split " + out.split_id + " line " + std::to_string(i + 1) + ": " + field);
    }
    if (v > INT32_MAX) {
      fail(ErrorCode::LabelOutOfRange, "split " + out.split_id + " line " + std::to_string(i + 1));
    }
    out.labels.push_back(static_cast<std::int32_t>(v));
  }
  if (out.labels.empty()) fail(ErrorCode::EmptyLabels, "split " + out.split_id + " has no labels");
  return out;
}

std::string format_labels(const LabelVector& labels) {
  std::string out = "label\n";
  for (auto y : labels.labels) {
    out += std::to_string(y);
    out += '\n';
  }
  return out;
}

LabelVector read_labels(const fs::path& path, std::string split_id) {
  const auto text = read_text(path);
  try {
    return parse_labels(text, std::move(split_id));
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

void write_labels(const LabelVector& labels, const fs::path& path) {
  write_text(path, format_labels(labels));
}

// ---------------------------------------------------------------- CSV predictions

CsvPredictions parse_prediction_csv(std::string_view text, std::string split_id) {
  const auto lines = lines_of(text);
  if (lines.empty()) fail(ErrorCode::Schema, "empty prediction CSV");
  const auto header = split_fields(lines[0]);
  bool with_labels = !header.empty() && header.back() == "y";
  const std::size_t k = header.size() - (with_labels ? 1 : 0);
  if (k == 0) fail(ErrorCode::Schema, "prediction CSV has no probability columns");
  for (std::size_t c = 0; c < k; ++c) {
    if (header[c] != "p" + std::to_string(c)) {
      fail(ErrorCode::Schema, "prediction CSV header column " + std::to_string(c + 1) +
                                  " should be 'p" + std::to_string(c) + "', got '" + header[c] + "'");
    }
  }

  CsvPredictions out;
  LabelVector labels;
  labels.split_id = split_id;
  std::uint32_t n = 0;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const auto fields = split_fields(lines[li]);
    if (fields.size() != header.size()) {
      fail(ErrorCode::Schema, "prediction CSV line " + std::to_string(li + 1) + " has " +
                                  std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < k; ++c) {
      double v = 0.0;
      if (!parse_double(fields[c], v)) {
        fail(ErrorCode::Schema, "prediction CSV line " + std::to_string(li + 1) + ": bad number '" +
                                    fields[c] + "'");
      }
      out.predictions.probs.push_back(static_cast<float>(v));
    }
    if (with_labels) {
      long long y = 0;
      if (!parse_int(fields.back(), y)) {
        fail(ErrorCode::NonIntegerLabel, "prediction CSV line " + std::to_string(li + 1));
      }
      if (y < 0) fail(ErrorCode::NegativeLabel, "prediction CSV line " + std::to_string(li + 1));
      labels.labels.push_back(static_cast<std::int32_t>(y));
    }
    ++n;
  }
  if (n == 0) fail(ErrorCode::ZeroDimension, "prediction CSV has no rows");
  out.predictions.n = n;
  out.predictions.k = static_cast<std::uint32_t>(k);
  if (with_labels) {
    validate_labels(labels, k);
    out.labels = std::move(labels);
  }
  return out;
}

// ---------------------------------------------------------------- manifest

EnsembleManifest parse_manifest(std::string_view json_text, const fs::path& base_dir,
                                const std::string& source) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(json_text, e.byte == 0 ? 0 : e.byte - 1);
    fail(ErrorCode::Schema, source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                ": malformed JSON");
  }

  auto bad = [&](const std::string& where, const std::string& what) -> void {
    fail(ErrorCode::Schema, source + ": " + where + ": " + what);
  };
  if (!doc.is_object()) bad("/", "top level must be an object");

  static const std::set<std::string> known{"k", "id_split", "ood_splits", "models",
                                           "pairing", "labels", "options"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.contains(key)) bad("/" + key, "unknown key");
  }

  EnsembleManifest m;
  m.base_dir = base_dir;

  if (!doc.contains("k") || !doc["k"].is_number_unsigned() || doc["k"].get<std::uint64_t>() < 1) {
    bad("/k", "required positive integer");
  }
  m.k = doc["k"].get<std::size_t>();

  if (!doc.contains("id_split") || !doc["id_split"].is_string()) bad("/id_split", "required string");
  m.id_split = doc["id_split"].get<std::string>();

  if (!doc.contains("ood_splits") || !doc["ood_splits"].is_array()) {
    bad("/ood_splits", "required array of strings");
  }
  std::set<std::string> seen_splits{m.id_split};
  for (std::size_t i = 0; i < doc["ood_splits"].size(); ++i) {
    const auto& s = doc["ood_splits"][i];
    if (!s.is_string()) bad("/ood_splits/" + std::to_string(i), "must be a string");
    if (!seen_splits.insert(s.get<std::string>()).second) {
      bad("/ood_splits/" + std::to_string(i), "duplicate split '" + s.get<std::string>() + "'");
    }
    m.ood_splits.push_back(s.get<std::string>());
  }
  const auto splits = m.splits();

  if (!doc.contains("models") || !doc["models"].is_array()) bad("/models", "required array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc["models"].size(); ++i) {
    const auto where = "/models/" + std::to_string(i);
    const auto& jm = doc["models"][i];
    if (!jm.is_object()) bad(where, "must be an object");
    if (!jm.contains("id") || !jm["id"].is_string() || jm["id"].get<std::string>().empty()) {
      bad(where + "/id", "required non-empty string");
    }
    ModelEntry entry;
    entry.id = jm["id"].get<std::string>();
    if (!ids.insert(entry.id).second) bad(where + "/id", "duplicate model id '" + entry.id + "'");
    if (!jm.contains("predictions") || !jm["predictions"].is_object()) {
      bad(where + "/predictions", "required object mapping split -> file");
    }
    for (const auto& [split, path] : jm["predictions"].items()) {
      if (!path.is_string()) bad(where + "/predictions/" + split, "must be a path string");
      if (!seen_splits.contains(split)) bad(where + "/predictions/" + split, "unknown split");
      entry.predictions.emplace(split, fs::path(path.get<std::string>()));
    }
    for (const auto& s : splits) {
      if (!entry.predictions.contains(s)) bad(where + "/predictions", "missing split '" + s + "'");
    }
    m.models.push_back(std::move(entry));
  }

  if (doc.contains("pairing")) {
    const auto& p = doc["pairing"];
    if (!p.is_object() || !p.contains("mode") || !p["mode"].is_string()) {
      bad("/pairing", "must be {\"mode\": \"all_pairs\"} or {\"mode\": \"anchor\", \"anchor\": id}");
    }
    const auto mode = p["mode"].get<std::string>();
    if (mode == "all_pairs") {
      m.pairing = Pairing::all_pairs();
    } else if (mode == "anchor") {
      if (!p.contains("anchor") || !p["anchor"].is_string()) bad("/pairing/anchor", "required string");
      m.pairing = Pairing::anchored(p["anchor"].get<std::string>());
    } else {
      bad("/pairing/mode", "unknown mode '" + mode + "'");
    }
  }

  if (doc.contains("labels")) {
    if (!doc["labels"].is_object()) bad("/labels", "must be an object mapping split -> file");
    for (const auto& [split, path] : doc["labels"].items()) {
      if (!path.is_string()) bad("/labels/" + split, "must be a path string");
      if (!seen_splits.contains(split)) bad("/labels/" + split, "unknown split");
      m.labels.emplace(split, fs::path(path.get<std::string>()));
    }
  }

  if (doc.contains("options")) {
    const auto& o = doc["options"];
    if (!o.is_object()) bad("/options", "must be an object");
    if (o.contains("severity")) {
      if (!o["severity"].is_object()) bad("/options/severity", "must map split -> integer");
      for (const auto& [split, sev] : o["severity"].items()) {
        if (!sev.is_number_integer()) bad("/options/severity/" + split, "must be an integer");
        if (!seen_splits.contains(split)) bad("/options/severity/" + split, "unknown split");
        m.severity.emplace(split, sev.get<int>());
      }
    }
  }
  return m;
}

EnsembleManifest load_manifest(const fs::path& path) {
  const auto text = read_text(path);
  auto m = parse_manifest(text, path.parent_path(), path.string());

  std::map<std::string, std::pair<std::uint32_t, std::string>> n_by_split;  // split -> (n, model)
  for (const auto& model : m.models) {
    for (const auto& [split, rel] : model.predictions) {
      const auto file = resolve(m.base_dir, rel);
      if (!fs::exists(file)) {
        fail(ErrorCode::DanglingPath, path.string() + ": model '" + model.id + "' split '" + split +
                                          "': no such file " + file.string());
      }
      const auto h = read_ddpm_header(file);
      if (h.k != m.k) {
        fail(ErrorCode::ClassCountMismatch, file.string() + ": k=" + std::to_string(h.k) +
                                                ", manifest says " + std::to_string(m.k));
      }
      const auto [it, fresh] = n_by_split.try_emplace(split, h.n, model.id);
      if (!fresh && it->second.first != h.n) {
        fail(ErrorCode::ShapeMismatch, path.string() + ": split '" + split + "': model '" +
                                           it->second.second + "' has n=" +
                                           std::to_string(it->second.first) + ", model '" +
                                           model.id + "' has n=" + std::to_string(h.n));
      }
    }
  }
  for (const auto& [split, rel] : m.labels) {
    const auto file = resolve(m.base_dir, rel);
    if (!fs::exists(file)) {
      fail(ErrorCode::DanglingPath,
           path.string() + ": labels for split '" + split + "': no such file " + file.string());
    }
  }
  enumerate_pairs(m);  // resolves the pairing; throws on a bad anchor or < 2 models
  return m;
}

std::string format_manifest(const EnsembleManifest& m, std::string_view generator) {
  json doc = json::object();
  doc["k"] = m.k;
  doc["id_split"] = m.id_split;
  doc["ood_splits"] = m.ood_splits;
  doc["models"] = json::array();
  for (const auto& model : m.models) {
    json preds = json::object();
    for (const auto& [split, p] : model.predictions) preds[split] = p.generic_string();
    doc["models"].push_back({{"id", model.id}, {"predictions", preds}});
  }
  if (m.pairing.kind == Pairing::Kind::Anchor) {
    doc["pairing"] = {{"mode", "anchor"}, {"anchor", m.pairing.anchor}};
  } else {
    doc["pairing"] = {{"mode", "all_pairs"}};
  }
  json labels = json::object();
  for (const auto& [split, p] : m.labels) labels[split] = p.generic_string();
  doc["labels"] = labels;
  json options = json::object();
  if (!m.severity.empty()) options["severity"] = m.severity;
  if (!generator.empty()) options["generator"] = std::string(generator);
  doc["options"] = options;
  return doc.dump(2) + "\n";
}

Ensemble load_ensemble(const EnsembleManifest& manifest) {
  Ensemble ens;
  ens.manifest = manifest;
  for (const auto& model : manifest.models) {
    for (const auto& split : manifest.splits()) {
      const auto file = resolve(manifest.base_dir, model.predictions.at(split));
      ens.predictions[model.id].emplace(split,
                                        read_predictions(file, model.id, split, manifest.k));
    }
  }
  for (const auto& [split, rel] : manifest.labels) {
    const auto file = resolve(manifest.base_dir, rel);
    auto labels = read_labels(file, split);
    const auto n = ens.n_samples(split);
    if (labels.size() != n) {
      fail(ErrorCode::LengthMismatch, file.string() + ": " + std::to_string(labels.size()) +
                                          " labels for " + std::to_string(n) + " samples");
    }
    try {
      validate_labels(labels, manifest.k);
    } catch (const Error& e) {
      fail(e.code(), file.string() + ": " + e.what());
    }
    ens.labels.emplace(split, std::move(labels));
  }
  enumerate_pairs(manifest);
  return ens;
}

fs::path write_ensemble(Ensemble& ens, const fs::path& dir, std::string_view generator) {
  auto& m = ens.manifest;
  fs::create_directories(dir / "labels");
  for (auto& model : m.models) {
    fs::create_directories(dir / model.id);
    model.predictions.clear();
    for (const auto& split : m.splits()) {
      const fs::path rel = fs::path(model.id) / (split + ".ddpm");
      write_predictions(ens.at(model.id, split), dir / rel);
      model.predictions.emplace(split, rel);
    }
  }
  m.labels.clear();
  for (const auto& [split, labels] : ens.labels) {
    const fs::path rel = fs::path("labels") / (split + ".csv");
    write_labels(labels, dir / rel);
    m.labels.emplace(split, rel);
  }
  m.base_dir = dir;
  const auto manifest_path = dir / "manifest.json";
  write_text(manifest_path, format_manifest(m, generator));
  return manifest_path;
}

// ---------------------------------------------------------------- files

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorCode::Io, "short write to " + path.string());
}

}  // namespace divdis::io
