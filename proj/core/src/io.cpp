#include "depthkit/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "depthkit/errors.hpp"

namespace depthkit::io {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt(std::uint64_t v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}


void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != header.size()) {
    throw config_error("csv row width does not match the header");
  }
  rows.push_back(std::move(cells));
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return j;
  }
  throw config_error("csv column not found: " + name);
}

std::vector<double> Table::numeric_column(const std::string& name) const {
  const std::size_t j = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    const std::string& cell = row[j];
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
      throw config_error("csv cell is not a number: " + cell);
    }
    out.push_back(v);
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot open file for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw config_error("failed writing file: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_csv(const std::string& path, const Table& table) {
  if (table.header.empty()) throw config_error("csv needs a header row");
  std::string out;
  auto append_row = [&out](const std::vector<std::string>& cells) {
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (cells[j].find_first_of(",\n\r") != std::string::npos) {
        throw config_error("csv cell contains a separator: " + cells[j]);
      }
      if (j) out.push_back(',');
      out += cells[j];
    }
    out.push_back('\n');
  };
  append_row(table.header);
  for (const auto& row : table.rows) append_row(row);
  write_text_file(path, out);
}

Table read_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  Table table;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::size_t line_end = end;
    if (line_end > pos && text[line_end - 1] == '\r') --line_end;
    std::vector<std::string> cells;
    std::size_t cell_start = pos;
    for (std::size_t i = pos; i <= line_end; ++i) {
      if (i == line_end || text[i] == ',') {
        cells.emplace_back(text, cell_start, i - cell_start);
        cell_start = i + 1;
      }
    }
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      table.add_row(std::move(cells));
    }
    pos = end + 1;
  }
  if (first) throw config_error("csv file is empty: " + path);
  return table;
}

namespace {

std::string sidecar_path(const std::string& csv_path) {
  return fs::path(csv_path).replace_extension(".json").string();
}

}  // namespace

void save_sample(const Sample& s, const std::string& csv_path) {
  if (s.n == 0 || s.d == 0) throw config_error("cannot save an empty sample");
  Table table;
  for (std::size_t j = 1; j <= s.d; ++j) table.header.push_back("x" + fmt(j));
  for (std::size_t i = 0; i < s.n; ++i) {
    std::vector<std::string> cells;
    cells.reserve(s.d);
    for (double v : s.row(i)) cells.push_back(fmt(v));
    table.add_row(std::move(cells));
  }
  write_csv(csv_path, table);
  if (s.dist) {
    ordered_json j;
    j["family"] = family_name(s.dist->family);
    j["shift"] = s.dist->shift.empty()
                     ? std::vector<double>(s.dist->dim(), 0.0)
                     : s.dist->shift;
    j["scale"] = s.dist->scale;
    j["n"] = s.n;
    j["seed"] = s.seed;
    write_text_file(sidecar_path(csv_path), j.dump(2) + "\n");
  }
}

Sample load_sample(const std::string& csv_path) {
  const Table table = read_csv(csv_path);
  Sample s;
  s.d = table.header.size();
  s.n = table.rows.size();
  if (s.n == 0) throw config_error("sample csv has no data rows: " + csv_path);
  s.data.reserve(s.n * s.d);
  for (std::size_t j = 0; j < s.d; ++j) {
    if (table.header[j] != "x" + fmt(j + 1)) {
      throw config_error("sample csv header must be x1..xd: " + csv_path);
    }
  }
  for (const auto& row : table.rows) {
    for (const auto& cell : row) {
      double v = 0.0;
      const auto res =
          std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        throw config_error("sample csv cell is not a number: " + cell);
      }
      s.data.push_back(v);
    }
  }
  const std::string side = sidecar_path(csv_path);
  std::error_code ec;
  if (fs::exists(side, ec)) {
    ordered_json j = ordered_json::parse(read_text_file(side));
    DistSpec spec;
    spec.family = family_from_name(j.at("family").get<std::string>());
    spec.shift = j.at("shift").get<std::vector<double>>();
    spec.scale = j.at("scale").get<double>();
    spec.validate();
    if (spec.dim() != s.d) {
      throw config_error("sample sidecar dimension mismatch: " + side);
    }
    s.dist = spec;
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  return s;
}

void write_manifest(const RunManifest& m, const std::string& path) {
  ordered_json j;
  j["command"] = m.command;
  j["params"] = ordered_json::object();
  for (const auto& [key, value] : m.params) j["params"][key] = value;
  j["seed"] = m.seed;
  j["replicates"] = m.replicates;
  j["outputs"] = m.outputs;
  j["duration_seconds"] = m.duration_seconds;
  if (m.failed) {
    j["failed"] = true;
    j["failed_stage"] = m.failed_stage;
  }
  if (!m.notes.empty()) {
    j["notes"] = ordered_json::object();
    for (const auto& [key, value] : m.notes) j["notes"][key] = value;
  }
  write_text_file(path, j.dump(2) + "\n");
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir, ec)) {
      throw config_error("output path exists and is not a directory: " + dir);
    }
    return;
  }
  if (!fs::create_directories(dir, ec) || ec) {
    throw config_error("cannot create output directory: " + dir);
  }
}

}  // namespace depthkit::io
