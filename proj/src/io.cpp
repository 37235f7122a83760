#include "rotavote/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rotavote/errors.hpp"

namespace rotavote {

namespace {

using nlohmann::json;

double parse_double(std::string_view field, int line_number) {
  // Strict: the whole trimmed field must be a float literal.
  const auto begin = field.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) throw ParseError("empty field", line_number);
  const auto end = field.find_last_not_of(" \t\r");
  field = field.substr(begin, end - begin + 1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError("not a number: '" + std::string(field) + "'", line_number);
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    if (next == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  return fields;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path, std::ios_base::openmode mode = std::ios_base::out) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path, std::ios_base::openmode mode = std::ios_base::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open for reading: " + path);
  return in;
}

}  // namespace

std::vector<Correspondence> read_correspondences(const std::string& path) {
  auto in = open_in(path);
  std::vector<Correspondence> corrs;
  std::string line;
  int line_number = 0;
  bool saw_content = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    saw_content = true;
    const auto fields = split(line, ',');
    if (line_number == 1 && !fields.empty()) {
      // Optional header: skip a first line whose first field is not a number.
      bool numeric = true;
      try {
        parse_double(fields[0], line_number);
      } catch (const ParseError&) {
        numeric = false;
      }
      if (!numeric) continue;
    }
    if (fields.size() != 6) {
      throw ParseError("expected 6 fields, got " + std::to_string(fields.size()), line_number);
    }
    Correspondence c;
    c.x = Vec3(parse_double(fields[0], line_number), parse_double(fields[1], line_number),
               parse_double(fields[2], line_number));
    c.y = Vec3(parse_double(fields[3], line_number), parse_double(fields[4], line_number),
               parse_double(fields[5], line_number));
    corrs.push_back(c);
  }
  if (!saw_content) throw EmptyFile("no data in " + path);
  if (corrs.empty()) throw EmptyFile("no correspondence rows in " + path);
  return corrs;
}

void write_correspondences(const std::vector<Correspondence>& corrs, const std::string& path) {
  auto out = open_out(path);
  out << "x0,x1,x2,y0,y1,y2\n";
  for (const auto& c : corrs) {
    out << fmt17(c.x.x()) << ',' << fmt17(c.x.y()) << ',' << fmt17(c.x.z()) << ','
        << fmt17(c.y.x()) << ',' << fmt17(c.y.y()) << ',' << fmt17(c.y.z()) << '\n';
  }
}

void write_result(const std::vector<RotationEstimate>& estimates, const std::string& path) {
  json doc = json::array();
  for (const auto& e : estimates) {
    json item;
    item["axis"] = {e.axis.x(), e.axis.y(), e.axis.z()};
    item["angle_rad"] = e.angle;
    std::vector<double> m;
    m.reserve(9);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m.push_back(e.rotation(r, c));
    item["matrix"] = m;
    item["inlier_count"] = e.inliers.size();
    item["inlier_indices"] = e.inliers;
    item["axis_votes"] = e.axis_votes;
    item["elapsed_s"] = e.elapsed_s;
    doc.push_back(std::move(item));
  }
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

std::vector<RotationEstimate> read_result(const std::string& path) {
  auto in = open_in(path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad result document: ") + e.what(), 0);
  }
  std::vector<RotationEstimate> estimates;
  for (const auto& item : doc) {
    RotationEstimate e;
    e.axis = Vec3(item["axis"][0], item["axis"][1], item["axis"][2]);
    e.angle = item["angle_rad"];
    const auto& m = item["matrix"];
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) e.rotation(r, c) = m[static_cast<std::size_t>(3 * r + c)];
    e.inliers = item["inlier_indices"].get<std::vector<int>>();
    e.axis_votes = item["axis_votes"];
    e.elapsed_s = item["elapsed_s"];
    estimates.push_back(std::move(e));
  }
  return estimates;
}

void write_truth(const SceneTruth& truth, const std::string& path) {
  auto out = open_out(path);
  out << "rotations " << truth.rotations.size() << '\n';
  for (const auto& r : truth.rotations) {
    for (int i = 0; i < 9; ++i) {
      if (i) out << ' ';
      out << fmt17(r(i / 3, i % 3));
    }
    out << '\n';
  }
  out << "labels " << truth.labels.size() << '\n';
  for (std::size_t i = 0; i < truth.labels.size(); ++i) {
    if (i) out << ' ';
    out << truth.labels[i];
  }
  out << '\n';
}

SceneTruth read_truth(const std::string& path) {
  auto in = open_in(path);
  std::string tag;
  std::size_t count = 0;
  if (!(in >> tag >> count) || tag != "rotations") throw ParseError("expected 'rotations N'", 1);
  SceneTruth truth;
  truth.rotations.resize(count);
  for (auto& r : truth.rotations) {
    for (int i = 0; i < 9; ++i) {
      if (!(in >> r(i / 3, i % 3))) throw ParseError("truncated rotation matrix", 0);
    }
  }
  if (!(in >> tag >> count) || tag != "labels") throw ParseError("expected 'labels N'", 0);
  truth.labels.resize(count);
  for (auto& l : truth.labels) {
    if (!(in >> l)) throw ParseError("truncated label list", 0);
  }
  return truth;
}

void dump_accumulator(const Accumulator2D& acc, const std::string& path, DumpFormat format) {
  if (format == DumpFormat::Text) {
    auto out = open_out(path);
    dump_accumulator_text(acc, out);
    if (!out) throw IoError("write failed: " + path);
  } else {
    auto out = open_out(path, std::ios_base::binary);
    dump_accumulator_pgm(acc, out);
    if (!out) throw IoError("write failed: " + path);
  }
}

}  // namespace rotavote
