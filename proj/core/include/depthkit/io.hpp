#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "depthkit/types.hpp"

namespace depthkit::io {

/// Shortest round-trip decimal form of v ('.' separator, "inf"/"nan" spelled
/// out).  All numeric file output goes through this, so re-parsing and
/// re-serializing any emitted file reproduces it byte for byte.
std::string fmt(double v);
std::string fmt(std::uint64_t v);

/// A rectangular CSV table: one header row, string cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells);  // must match header width
  std::size_t column(const std::string& name) const;  // config_error if absent
  std::vector<double> numeric_column(const std::string& name) const;
};

/// LF line endings, no quoting (cells must not contain ',' or newlines).
void write_csv(const std::string& path, const Table& table);
Table read_csv(const std::string& path);

/// Sample CSV with header x1..xd plus a JSON sidecar (same path, .json
/// extension) recording {family, shift, scale, n, seed} when the sample
/// carries its generating spec.
void save_sample(const Sample& s, const std::string& csv_path);
/// Reads the CSV and, when the sidecar exists, the generating spec.
Sample load_sample(const std::string& csv_path);

/// What a CLI run did: parameters in, files out.  Written once, after every
/// listed output file exists.  duration_seconds is wall clock and is the one
/// field exempt from byte-identical reproducibility.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> params;
  std::uint64_t seed = 0;
  std::size_t replicates = 0;
  std::vector<std::string> outputs;
  double duration_seconds = 0.0;
  bool failed = false;
  std::string failed_stage;
  std::map<std::string, std::string> notes;
};

void write_manifest(const RunManifest& m, const std::string& path);

/// Creates the directory (and parents) if needed; config_error when the path
/// exists as a non-directory.
void ensure_dir(const std::string& dir);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace depthkit::io
