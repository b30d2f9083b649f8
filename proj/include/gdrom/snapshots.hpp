#pragma once

#include "gdrom/types.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

namespace gdrom {

/// Velocity snapshots u_h^j (columns) at equispaced times t_first + j * dt.
struct SnapshotSet {
  MatrixX data;
  real dt = 0.0;
  real t_first = 0.0;

  Index count() const { return data.cols(); }
  Index n_dofs() const { return data.rows(); }
  real time(Index j) const { return t_first + static_cast<real>(j) * dt; }
  std::vector<real> times() const;

  /// First `count` snapshots (count >= 1).
  SnapshotSet leading(Index count) const;
};

void save_snapshots(const std::filesystem::path& path, const SnapshotSet& set);
SnapshotSet load_snapshots(const std::filesystem::path& path);

/// Appends snapshot records to a file, patching the count on close.
class SnapshotWriter {
 public:
  SnapshotWriter(const std::filesystem::path& path, Index n_dofs, real dt);
  SnapshotWriter(const SnapshotWriter&) = delete;
  SnapshotWriter& operator=(const SnapshotWriter&) = delete;
  ~SnapshotWriter();

  void append(real time, const VectorX& u);
  void close();
  Index count() const { return count_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  Index n_dofs_;
  real dt_;
  Index count_ = 0;
};

}  // namespace gdrom
