#include "windowing.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "common.hpp"
#include "csvio.hpp"
#include "util.hpp"

namespace midas {

WindowDataset build_windows(const CompressedSet& segments, int l, int stride) {
  if (l < 1 || stride < 1)
    throw Error(ErrorCode::InvalidArgument, "window length and stride must be >= 1");
  if (segments.per_sensor.empty())
    throw Error(ErrorCode::InvalidArgument, "no compressed sensors");
  std::size_t S = segments.per_sensor[0].size();
  for (const auto& sensor : segments.per_sensor)
    if (sensor.size() != S)
      throw Error(ErrorCode::MisalignedStreams, "sensors have differing segment counts");
  if (S < static_cast<std::size_t>(l))
    throw Error(ErrorCode::InsufficientData,
                "need at least " + std::to_string(l) + " segments, have " + std::to_string(S));

  WindowDataset ds;
  ds.l = l;
  ds.stride = stride;
  ds.n_sensors = segments.per_sensor.size();
  ds.n_windows = (S - static_cast<std::size_t>(l)) / static_cast<std::size_t>(stride) + 1;
  const std::size_t C = ds.channels();
  ds.tensor.resize(ds.n_windows * static_cast<std::size_t>(l) * C);
  for (std::size_t b = 0; b < ds.n_windows; ++b)
    for (int t = 0; t < l; ++t) {
      std::size_t seg = b * static_cast<std::size_t>(stride) + static_cast<std::size_t>(t);
      for (std::size_t i = 0; i < ds.n_sensors; ++i) {
        ds.at(b, t, i) = segments.per_sensor[i][seg].mu;
        ds.at(b, t, ds.n_sensors + i) = segments.per_sensor[i][seg].sigma;
      }
    }
  return ds;
}

NormStats compute_stats(const WindowDataset& dataset) {
  const std::size_t C = dataset.channels();
  const std::size_t rows = dataset.n_windows * static_cast<std::size_t>(dataset.l);
  if (rows == 0) throw Error(ErrorCode::InvalidArgument, "empty dataset");
  NormStats stats;
  stats.mean.assign(C, 0.0);
  stats.stddev.assign(C, 0.0);
  stats.clamped.assign(C, 0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < C; ++c) stats.mean[c] += dataset.tensor[r * C + c];
  for (std::size_t c = 0; c < C; ++c) stats.mean[c] /= static_cast<double>(rows);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < C; ++c) {
      double d = dataset.tensor[r * C + c] - stats.mean[c];
      stats.stddev[c] += d * d;
    }
  for (std::size_t c = 0; c < C; ++c) {
    stats.stddev[c] = std::sqrt(stats.stddev[c] / static_cast<double>(rows));
    if (stats.stddev[c] <= 0.0) {
      stats.stddev[c] = 1.0;
      stats.clamped[c] = 1;
      log_warn("channel " + std::to_string(c) + " has zero variance; std clamped to 1");
    }
  }
  return stats;
}

void normalize(WindowDataset& dataset, const NormStats& stats) {
  if (stats.channels() != dataset.channels())
    throw Error(ErrorCode::InvalidArgument, "normalization stats channel mismatch");
  if (dataset.normalized)
    throw Error(ErrorCode::InvalidArgument, "dataset already normalized");
  const std::size_t C = dataset.channels();
  const std::size_t rows = dataset.n_windows * static_cast<std::size_t>(dataset.l);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < C; ++c)
      dataset.tensor[r * C + c] = (dataset.tensor[r * C + c] - stats.mean[c]) / stats.stddev[c];
  dataset.stats = stats;
  dataset.normalized = true;
}

void denormalize(WindowDataset& dataset) {
  if (!dataset.normalized)
    throw Error(ErrorCode::InvalidArgument, "dataset is not normalized");
  const std::size_t C = dataset.channels();
  const std::size_t rows = dataset.n_windows * static_cast<std::size_t>(dataset.l);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < C; ++c)
      dataset.tensor[r * C + c] =
          dataset.tensor[r * C + c] * dataset.stats.stddev[c] + dataset.stats.mean[c];
  dataset.normalized = false;
}

void save_stats_csv(const std::string& path, const NormStats& stats) {
  std::ostringstream out;
  out << "channel,mean,std,clamped\n";
  for (std::size_t c = 0; c < stats.channels(); ++c)
    out << c << ',' << fmt_double(stats.mean[c]) << ',' << fmt_double(stats.stddev[c]) << ','
        << static_cast<int>(stats.clamped[c]) << "\n";
  atomic_write_file(path, out.str());
}

NormStats load_stats_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || trim(line) != "channel,mean,std,clamped")
    throw Error(ErrorCode::Io, "bad stats header in " + path);
  NormStats stats;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != 4) throw Error(ErrorCode::Io, "ragged stats row in " + path);
    stats.mean.push_back(parse_double(cells[1]));
    stats.stddev.push_back(parse_double(cells[2]));
    stats.clamped.push_back(static_cast<std::uint8_t>(parse_long(cells[3])));
  }
  return stats;
}

void save_dataset(const std::string& dir, const WindowDataset& dataset) {
  ensure_dir(dir);
  namespace fs = std::filesystem;
  const std::size_t C = dataset.channels();
  std::ostringstream out;
  out << "# shape: " << dataset.n_windows << ' ' << dataset.l << ' ' << C
      << " stride: " << dataset.stride << " normalized: " << (dataset.normalized ? 1 : 0)
      << "\n";
  out << "window,step";
  for (std::size_t i = 0; i < dataset.n_sensors; ++i) out << ",mu" << (i + 1);
  for (std::size_t i = 0; i < dataset.n_sensors; ++i) out << ",sigma" << (i + 1);
  out << "\n";
  for (std::size_t b = 0; b < dataset.n_windows; ++b)
    for (int t = 0; t < dataset.l; ++t) {
      out << b << ',' << t;
      for (std::size_t c = 0; c < C; ++c) out << ',' << fmt_double(dataset.at(b, t, c));
      out << "\n";
    }
  atomic_write_file((fs::path(dir) / "tensor.csv").string(), out.str());
  save_stats_csv((fs::path(dir) / "stats.csv").string(), dataset.stats);
  write_layout_csv((fs::path(dir) / "layout.csv").string(), dataset.layout);
}

WindowDataset load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  std::istringstream in(read_file((fs::path(dir) / "tensor.csv").string()));
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Io, "empty tensor.csv in " + dir);
  WindowDataset ds;
  {
    auto fields = split(trim(line), ' ');
    // "# shape: B l C stride: s normalized: z"
    if (fields.size() != 9 || fields[0] != "#" || fields[1] != "shape:")
      throw Error(ErrorCode::Io, "bad tensor.csv shape line in " + dir);
    ds.n_windows = static_cast<std::size_t>(parse_long(fields[2]));
    ds.l = static_cast<int>(parse_long(fields[3]));
    std::size_t C = static_cast<std::size_t>(parse_long(fields[4]));
    if (C % 2 != 0) throw Error(ErrorCode::Io, "channel count must be even in " + dir);
    ds.n_sensors = C / 2;
    ds.stride = static_cast<int>(parse_long(fields[6]));
    ds.normalized = parse_long(fields[8]) != 0;
  }
  if (!std::getline(in, line)) throw Error(ErrorCode::Io, "truncated tensor.csv in " + dir);
  const std::size_t C = ds.channels();
  ds.tensor.resize(ds.n_windows * static_cast<std::size_t>(ds.l) * C);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != C + 2) throw Error(ErrorCode::Io, "ragged tensor row in " + dir);
    if (row >= ds.n_windows * static_cast<std::size_t>(ds.l))
      throw Error(ErrorCode::Io, "tensor.csv has more rows than its shape in " + dir);
    for (std::size_t c = 0; c < C; ++c) ds.tensor[row * C + c] = parse_double(cells[c + 2]);
    ++row;
  }
  if (row != ds.n_windows * static_cast<std::size_t>(ds.l))
    throw Error(ErrorCode::Io, "tensor.csv row count mismatch in " + dir);
  ds.stats = load_stats_csv((fs::path(dir) / "stats.csv").string());
  if (ds.stats.channels() != C)
    throw Error(ErrorCode::Io, "stats.csv channel mismatch in " + dir);
  ds.layout = read_layout_csv((fs::path(dir) / "layout.csv").string());
  return ds;
}

}  // namespace midas
