#include "ahtsgd/data_io.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <sstream>

#include "ahtsgd/errors.hpp"
#include "ahtsgd/rng.hpp"

namespace ahtsgd {
namespace {

constexpr uint32_t kImagesMagic = 0x00000803;
constexpr uint32_t kLabelsMagic = 0x00000801;

// RAII reader over zlib's gz* API, which hands back the uncompressed bytes
// of plain and gzip files alike. Tracks the uncompressed offset for errors.
class GzReader {
 public:
  explicit GzReader(const std::string& path) : path_(path), f_(gzopen(path.c_str(), "rb")) {
    if (!f_) throw IoError("cannot open " + path);
  }
  GzReader(const GzReader&) = delete;
  GzReader& operator=(const GzReader&) = delete;
  ~GzReader() {
    if (f_) gzclose(f_);
  }

  void read_exact(void* buf, std::size_t n) {
    auto* out = static_cast<unsigned char*>(buf);
    while (n > 0) {
      unsigned chunk = n > (1u << 30) ? (1u << 30) : static_cast<unsigned>(n);
      int got = gzread(f_, out, chunk);
      if (got <= 0) throw ParseError("truncated file " + path_, offset_);
      offset_ += got;
      out += got;
      n -= static_cast<std::size_t>(got);
    }
  }

  uint32_t read_u32_be() {
    unsigned char b[4];
    read_exact(b, 4);
    return (uint32_t(b[0]) << 24) | (uint32_t(b[1]) << 16) | (uint32_t(b[2]) << 8) | uint32_t(b[3]);
  }

  // True when every uncompressed byte has been consumed.
  bool at_eof() {
    unsigned char probe;
    int got = gzread(f_, &probe, 1);
    if (got > 0) offset_ += 1;
    return got == 0;
  }

  long long offset() const { return offset_; }

 private:
  std::string path_;
  gzFile f_;
  long long offset_ = 0;
};

std::string hex_magic(uint32_t m) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", m);
  return buf;
}

}  // namespace

double normalize_pixel(double raw) { return (raw / 255.0 - kMnistMean) / kMnistStd; }

double denormalize_pixel(double value) {
  return std::round((value * kMnistStd + kMnistMean) * 255.0);
}

IdxDataset load_idx(const std::string& path_images, const std::string& path_labels,
                    IdxDataset::Split split) {
  GzReader img(path_images);
  uint32_t magic = img.read_u32_be();
  if (magic != kImagesMagic)
    throw ParseError("bad images magic " + hex_magic(magic) + " in " + path_images +
                         ", expected " + hex_magic(kImagesMagic),
                     0);
  uint32_t n = img.read_u32_be();
  uint32_t rows = img.read_u32_be();
  uint32_t cols = img.read_u32_be();
  if (n == 0 || rows == 0 || cols == 0)
    throw ParseError("degenerate dimensions in " + path_images, 4);

  std::vector<unsigned char> pixels(std::size_t(n) * rows * cols);
  img.read_exact(pixels.data(), pixels.size());
  if (!img.at_eof())
    throw ParseError("trailing bytes after image payload in " + path_images, img.offset() - 1);

  GzReader lab(path_labels);
  magic = lab.read_u32_be();
  if (magic != kLabelsMagic)
    throw ParseError("bad labels magic " + hex_magic(magic) + " in " + path_labels +
                         ", expected " + hex_magic(kLabelsMagic),
                     0);
  uint32_t n_labels = lab.read_u32_be();
  if (n_labels != n)
    throw ParseError("label count " + std::to_string(n_labels) + " in " + path_labels +
                         " does not match image count " + std::to_string(n),
                     4);
  std::vector<unsigned char> labels(n_labels);
  lab.read_exact(labels.data(), labels.size());
  if (!lab.at_eof())
    throw ParseError("trailing bytes after label payload in " + path_labels, lab.offset() - 1);

  IdxDataset ds;
  ds.split = split;
  ds.image_rows = rows;
  ds.image_cols = cols;
  const Eigen::Index d = Eigen::Index(rows) * cols;
  ds.images.resize(d, n);
  for (Eigen::Index j = 0; j < Eigen::Index(n); ++j) {
    const unsigned char* p = pixels.data() + std::size_t(j) * d;
    for (Eigen::Index i = 0; i < d; ++i)
      ds.images(i, j) = static_cast<float>(normalize_pixel(p[i]));
  }
  ds.labels.resize(n);
  for (Eigen::Index j = 0; j < Eigen::Index(n); ++j) {
    if (labels[j] > 9)
      throw ParseError("label " + std::to_string(int(labels[j])) + " out of range in " +
                           path_labels,
                       8 + j);
    ds.labels[j] = labels[j];
  }
  return ds;
}

std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, RngStream& rng) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  for (Eigen::Index i = n - 1; i > 0; --i) {
    auto j = static_cast<Eigen::Index>(rng.bounded_u64(static_cast<uint64_t>(i) + 1));
    std::swap(order[i], order[j]);
  }
  return order;
}

IdxDataset select(const IdxDataset& ds, const std::vector<Eigen::Index>& indices) {
  IdxDataset out;
  out.split = ds.split;
  out.image_rows = ds.image_rows;
  out.image_cols = ds.image_cols;
  out.images.resize(ds.feature_dim(), static_cast<Eigen::Index>(indices.size()));
  out.labels.resize(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    Eigen::Index src = indices[k];
    if (src < 0 || src >= ds.size()) throw ParameterError("select index out of range");
    out.images.col(static_cast<Eigen::Index>(k)) = ds.images.col(src);
    out.labels[static_cast<Eigen::Index>(k)] = ds.labels[src];
  }
  return out;
}

Batch make_batch(const IdxDataset& ds, const Eigen::Index* idx, Eigen::Index count) {
  Batch b;
  b.x.resize(ds.feature_dim(), count);
  b.y.resize(count);
  for (Eigen::Index k = 0; k < count; ++k) {
    b.x.col(k) = ds.images.col(idx[k]).cast<double>();
    b.y[k] = ds.labels[idx[k]];
  }
  return b;
}

EpochBatches::EpochBatches(const IdxDataset& ds, Eigen::Index batch_size, uint64_t seed,
                           uint64_t epoch)
    : ds_(&ds), batch_size_(batch_size) {
  if (batch_size < 1) throw ParameterError("batch_size must be >= 1");
  RngStream rng(seed, stream_ids::kShuffleBase + epoch);
  order_ = shuffled_indices(ds.size(), rng);
}

Eigen::Index EpochBatches::num_batches() const {
  return (ds_->size() + batch_size_ - 1) / batch_size_;
}

Batch EpochBatches::batch(Eigen::Index i) const {
  if (i < 0 || i >= num_batches()) throw ParameterError("batch index out of range");
  Eigen::Index begin = i * batch_size_;
  Eigen::Index count = std::min(batch_size_, ds_->size() - begin);
  return make_batch(*ds_, order_.data() + begin, count);
}

const char* RunCsvWriter::header() {
  return "step,epoch,split,loss,accuracy,alpha,sigma,sharpness_raw,sharpness_ema,lambda_max,"
         "grad_norm,wall_ms";
}

RunCsvWriter::RunCsvWriter(const std::string& path) : path_(path), out_(path) {
  if (!out_) throw IoError("cannot open " + path + " for writing");
  out_ << header() << '\n';
  out_.flush();
}

namespace {

// 10 significant digits: enough for a 9-digit round trip, short enough to diff.
void append_cell(std::string& line, double v) {
  line.push_back(',');
  if (std::isnan(v)) return;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  line += buf;
}

}  // namespace

void RunCsvWriter::append(const RunRecord& row) {
  std::string line = std::to_string(row.step);
  line.push_back(',');
  line += std::to_string(row.epoch);
  line.push_back(',');
  line += row.split;
  append_cell(line, row.loss);
  append_cell(line, row.accuracy);
  append_cell(line, row.alpha);
  append_cell(line, row.sigma);
  append_cell(line, row.sharpness_raw);
  append_cell(line, row.sharpness_ema);
  append_cell(line, row.lambda_max);
  append_cell(line, row.grad_norm);
  append_cell(line, row.wall_ms);
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw IoError("write failed on " + path_);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ParseError("missing CSV column " + name, 0);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
      auto comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

}  // namespace ahtsgd
