#pragma once

// File formats: PGM images (binary P5 or ASCII P2, normalized to [0,1]),
// CSV matrices (row-major, one image row per line) and labeled dataset CSV
// (`label,feature1,...,featureD`).

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "moreau/linops.hpp"

namespace moreau {

struct Image {
  Index rows = 0;
  Index cols = 0;
  Vector pixels;  // row-major, values in [0,1]
};

namespace detail {

// Skips whitespace and '#' comment lines between PGM header tokens.
inline std::string next_pgm_token(std::istream& in) {
  std::string tok;
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (std::isspace(ch)) {
      ch = in.get();
    } else {
      break;
    }
  }
  while (ch != EOF && !std::isspace(ch)) {
    tok.push_back(static_cast<char>(ch));
    ch = in.get();
  }
  return tok;
}

}  // namespace detail

inline Image read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_pgm: cannot open " + path);
  const std::string magic = detail::next_pgm_token(in);
  if (magic != "P5" && magic != "P2") {
    throw std::runtime_error("read_pgm: " + path + " is not a P2/P5 PGM file");
  }
  const std::string w = detail::next_pgm_token(in);
  const std::string h = detail::next_pgm_token(in);
  const std::string mv = detail::next_pgm_token(in);
  if (w.empty() || h.empty() || mv.empty()) {
    throw std::runtime_error("read_pgm: truncated header in " + path);
  }
  Image img;
  img.cols = std::stol(w);
  img.rows = std::stol(h);
  const long maxval = std::stol(mv);
  if (img.rows < 1 || img.cols < 1 || maxval < 1 || maxval > 255) {
    throw std::runtime_error("read_pgm: unsupported dimensions or maxval in " + path);
  }
  img.pixels.resize(img.rows * img.cols);
  if (magic == "P5") {
    std::vector<unsigned char> raw(static_cast<std::size_t>(img.rows * img.cols));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
      throw std::runtime_error("read_pgm: truncated pixel data in " + path);
    }
    for (Index i = 0; i < img.pixels.size(); ++i) {
      img.pixels[i] = raw[static_cast<std::size_t>(i)] / static_cast<double>(maxval);
    }
  } else {
    for (Index i = 0; i < img.pixels.size(); ++i) {
      const std::string tok = detail::next_pgm_token(in);
      if (tok.empty()) throw std::runtime_error("read_pgm: truncated pixel data in " + path);
      img.pixels[i] = std::stol(tok) / static_cast<double>(maxval);
    }
  }
  return img;
}

/// Writes a binary P5 PGM with maxval 255; pixels clamped to [0,1].
inline void write_pgm(const std::string& path, const Image& img) {
  if (img.pixels.size() != img.rows * img.cols) {
    throw std::invalid_argument("write_pgm: pixel count does not match dimensions");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
  out << "P5\n" << img.cols << " " << img.rows << "\n255\n";
  std::vector<unsigned char> raw(static_cast<std::size_t>(img.pixels.size()));
  for (Index i = 0; i < img.pixels.size(); ++i) {
    const double v = std::clamp(img.pixels[i], 0.0, 1.0);
    raw[static_cast<std::size_t>(i)] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw std::runtime_error("write_pgm: write failed for " + path);
}

inline Matrix read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv_matrix: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("read_csv_matrix: ragged rows in " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("read_csv_matrix: empty file " + path);
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

inline void write_csv_matrix(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv_matrix: cannot open " + path);
  out.precision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ",";
      out << m(i, j);
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write_csv_matrix: write failed for " + path);
}

struct LabeledPoints {
  std::vector<Vector> points;
  std::vector<int> labels;
};

/// Reads `label,feature1,...,featureD` rows; labels must be +1 or -1.
inline LabeledPoints read_dataset_csv(const std::string& path) {
  const Matrix m = read_csv_matrix(path);
  if (m.cols() < 2) throw std::runtime_error("read_dataset_csv: need label plus features in " + path);
  LabeledPoints ds;
  ds.points.reserve(static_cast<std::size_t>(m.rows()));
  ds.labels.reserve(static_cast<std::size_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i) {
    const int label = static_cast<int>(std::lround(m(i, 0)));
    if (label != 1 && label != -1) {
      throw std::runtime_error("read_dataset_csv: labels must be +1/-1 in " + path);
    }
    ds.labels.push_back(label);
    ds.points.push_back(m.row(i).tail(m.cols() - 1).transpose());
  }
  return ds;
}

inline void write_dataset_csv(const std::string& path, const LabeledPoints& ds) {
  if (ds.points.size() != ds.labels.size()) {
    throw std::invalid_argument("write_dataset_csv: points/labels size mismatch");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_dataset_csv: cannot open " + path);
  out.precision(17);
  for (std::size_t i = 0; i < ds.points.size(); ++i) {
    out << ds.labels[i];
    for (Index j = 0; j < ds.points[i].size(); ++j) out << "," << ds.points[i][j];
    out << "\n";
  }
  if (!out) throw std::runtime_error("write_dataset_csv: write failed for " + path);
}

}  // namespace moreau
