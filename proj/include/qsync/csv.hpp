// Copyright 2026 The qsync Authors
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

#pragma once

// CSV export. Every file starts with a header row whose first column is "t";
// times are written fixed-point with 9 decimals and values in %.16e, rows in
// time order. Complex quantities become "<name>_re","<name>_im" pairs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qsync/analysis.hpp"
#include "qsync/consensus.hpp"
#include "qsync/errors.hpp"
#include "qsync/hilbert.hpp"
#include "qsync/lindblad.hpp"

namespace qsync {

class CsvWriter {
public:
  CsvWriter(const std::filesystem::path &path,
            const std::vector<std::string> &header)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) {
      throw IoError("cannot open '" + path.string() + "' for writing");
    }
    columns_ = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
      out_ << (i ? "," : "") << header[i];
    }
    out_ << '\n';
  }

  void row(double t, const std::vector<double> &values) {
    if (values.size() + 1 != columns_) {
      throw ValidationError("csv row width does not match header");
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", t);
    out_ << buf;
    for (double v : values) {
      std::snprintf(buf, sizeof buf, ",%.16e", v);
      out_ << buf;
    }
    out_ << '\n';
  }

  void close() {
    out_.close();
    if (!out_) {
      throw IoError("failed writing '" + path_.string() + "'");
    }
  }

private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_ = 0;
};

namespace detail {
inline void require_samples(std::size_t count) {
  if (count == 0) {
    throw ValidationError("cannot export an empty series");
  }
}
} // namespace detail

/// Header t,<name>.
inline void export_series(const std::filesystem::path &path,
                          const std::string &name,
                          const std::vector<double> &times,
                          const std::vector<double> &values) {
  detail::require_samples(times.size());
  if (times.size() != values.size()) {
    throw ValidationError("series times and values differ in length");
  }
  CsvWriter w(path, {"t", name});
  for (std::size_t k = 0; k < times.size(); ++k) {
    w.row(times[k], {values[k]});
  }
  w.close();
}

/// Header t,d<bits>... with one column per basis label.
inline void export_diagonals(const std::filesystem::path &path,
                             const Trajectory &traj) {
  detail::require_samples(traj.size());
  const int n = traj.states.front().qubits();
  std::vector<std::string> header{"t"};
  for (std::uint32_t x = 0; x < traj.states.front().dim(); ++x) {
    header.push_back("d" + label_bits(n, x));
  }
  CsvWriter w(path, header);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    w.row(traj.times[k], diagonal_of(traj.states[k]));
  }
  w.close();
}

/// Header t,E_o.
inline void export_decoherence(const std::filesystem::path &path,
                               const Trajectory &traj) {
  detail::require_samples(traj.size());
  std::vector<double> eo;
  eo.reserve(traj.size());
  for (const auto &s : traj.states) {
    eo.push_back(decoherence_measure(s));
  }
  export_series(path, "E_o", traj.times, eo);
}

/// Header t,corner_re,corner_im,corner_modulus,phase_error.
inline void export_corner(const std::filesystem::path &path,
                          const CornerReport &report) {
  detail::require_samples(report.samples.size());
  CsvWriter w(path, {"t", "corner_re", "corner_im", "corner_modulus", "phase_error"});
  for (const auto &s : report.samples) {
    w.row(s.t, {s.value.real(), s.value.imag(), s.modulus, s.phase_error});
  }
  w.close();
}

/// Every entry: header t,r<x>_<y>_re,r<x>_<y>_im,... in row-major order.
inline void export_entries(const std::filesystem::path &path,
                           const Trajectory &traj) {
  detail::require_samples(traj.size());
  const int n = traj.states.front().qubits();
  const auto dim = static_cast<std::uint32_t>(traj.states.front().dim());
  std::vector<std::string> header{"t"};
  for (std::uint32_t x = 0; x < dim; ++x) {
    for (std::uint32_t y = 0; y < dim; ++y) {
      const std::string name = "r" + label_bits(n, x) + "_" + label_bits(n, y);
      header.push_back(name + "_re");
      header.push_back(name + "_im");
    }
  }
  CsvWriter w(path, header);
  std::vector<double> row;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    row.clear();
    for (std::uint32_t x = 0; x < dim; ++x) {
      for (std::uint32_t y = 0; y < dim; ++y) {
        row.push_back(traj.states[k](x, y).real());
        row.push_back(traj.states[k](x, y).imag());
      }
    }
    w.row(traj.times[k], row);
  }
  w.close();
}

/// Header t,X1_re,X1_im,...,XN_re,XN_im (nodes 1-based).
inline void export_classical(const std::filesystem::path &path,
                             const ClassicalTrajectory &traj) {
  detail::require_samples(traj.times.size());
  const auto nodes = traj.states.front().size();
  std::vector<std::string> header{"t"};
  for (Eigen::Index i = 0; i < nodes; ++i) {
    header.push_back("X" + std::to_string(i + 1) + "_re");
    header.push_back("X" + std::to_string(i + 1) + "_im");
  }
  CsvWriter w(path, header);
  std::vector<double> row;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    row.clear();
    for (Eigen::Index i = 0; i < nodes; ++i) {
      row.push_back(traj.states[k](i).real());
      row.push_back(traj.states[k](i).imag());
    }
    w.row(traj.times[k], row);
  }
  w.close();
}

} // namespace qsync
