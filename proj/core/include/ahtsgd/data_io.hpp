#ifndef AHTSGD_DATA_IO_HPP
#define AHTSGD_DATA_IO_HPP

#include <Eigen/Core>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "ahtsgd/objectives.hpp"

namespace ahtsgd {

class RngStream;

inline constexpr double kMnistMean = 0.1307;
inline constexpr double kMnistStd = 0.3081;

// (raw/255 - mean)/std, computed in double precision.
double normalize_pixel(double raw);
// Inverse of normalize_pixel snapped back to the integer pixel grid, so the
// round trip is exact even when normalized values were stored as float32.
double denormalize_pixel(double value);

// A labeled image set, one normalized example per column (row-major pixel
// order within the column). Immutable after load; share freely across runs.
struct IdxDataset {
  enum class Split { train, test };
  Eigen::MatrixXf images;
  Eigen::VectorXi labels;
  Eigen::Index image_rows = 0;
  Eigen::Index image_cols = 0;
  Split split = Split::train;

  Eigen::Index size() const { return images.cols(); }
  Eigen::Index feature_dim() const { return images.rows(); }
};

// Parses an IDX image/label file pair, plain or gzip-compressed (the
// container is sniffed, not taken from the extension). Validates the magic
// numbers (0x00000803 images, 0x00000801 labels, big-endian), dimensions,
// label range, and that both files agree on the example count. Parse
// problems throw ParseError naming the uncompressed byte offset; unreadable
// paths throw IoError.
IdxDataset load_idx(const std::string& path_images, const std::string& path_labels,
                    IdxDataset::Split split);

// Fisher-Yates permutation of {0..n-1} drawn from the given stream.
std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, RngStream& rng);

// New dataset holding the listed examples, in the order given.
IdxDataset select(const IdxDataset& ds, const std::vector<Eigen::Index>& indices);

// Materializes the chosen examples as a double-precision training batch.
Batch make_batch(const IdxDataset& ds, const Eigen::Index* idx, Eigen::Index count);

// One epoch's batch plan: a fresh shuffle keyed by (seed, epoch), cut into
// batch_size chunks with the short final batch kept. Same key, same plan.
class EpochBatches {
 public:
  EpochBatches(const IdxDataset& ds, Eigen::Index batch_size, uint64_t seed, uint64_t epoch);

  Eigen::Index num_batches() const;
  Batch batch(Eigen::Index i) const;
  const std::vector<Eigen::Index>& order() const { return order_; }

 private:
  const IdxDataset* ds_;
  Eigen::Index batch_size_;
  std::vector<Eigen::Index> order_;
};

// One logged training event. NaN-valued fields serialize as empty cells
// (lambda_max and accuracy are only measured on some rows).
struct RunRecord {
  uint64_t step = 0;
  uint64_t epoch = 0;
  std::string split;  // "train" or "test"
  double loss = std::numeric_limits<double>::quiet_NaN();
  double accuracy = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double sigma = std::numeric_limits<double>::quiet_NaN();
  double sharpness_raw = std::numeric_limits<double>::quiet_NaN();
  double sharpness_ema = std::numeric_limits<double>::quiet_NaN();
  double lambda_max = std::numeric_limits<double>::quiet_NaN();
  double grad_norm = std::numeric_limits<double>::quiet_NaN();
  double wall_ms = std::numeric_limits<double>::quiet_NaN();
};

// Streams RunRecords to CSV, flushing after every row so a killed run still
// leaves a readable prefix. Values print with 10 significant digits.
class RunCsvWriter {
 public:
  explicit RunCsvWriter(const std::string& path);

  void append(const RunRecord& row);
  const std::string& path() const { return path_; }

  static const char* header();

 private:
  std::string path_;
  std::ofstream out_;
};

// Minimal CSV reader for our own artifacts (no quoting; fields never
// contain commas). Returns header + string rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a named column; throws ParseError if absent.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace ahtsgd

#endif  // AHTSGD_DATA_IO_HPP
