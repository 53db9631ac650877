#include "csvio.hpp"

#include <sstream>

#include "common.hpp"
#include "util.hpp"

namespace midas {

void write_strain_csv(const std::string& path, const StrainSet& set) {
  std::ostringstream out;
  out << "time";
  for (std::size_t i = 0; i < set.sensor_count(); ++i) out << ",s" << (i + 1);
  out << "\n";
  for (std::size_t t = 0; t < set.sample_count(); ++t) {
    out << fmt_double(set.time[t]);
    for (std::size_t i = 0; i < set.sensor_count(); ++i)
      out << ',' << fmt_double(set.strain[i][t]);
    out << "\n";
  }
  atomic_write_file(path, out.str());
}

StrainSet read_strain_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::Io, "empty strain file: " + path);
  auto header = split(trim(line), ',');
  if (header.size() < 2 || header[0] != "time")
    throw Error(ErrorCode::Io, "bad strain header in " + path);
  std::size_t n = header.size() - 1;
  StrainSet set;
  set.strain.resize(n);
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != n + 1)
      throw Error(ErrorCode::Io, "ragged strain row in " + path);
    set.time.push_back(parse_double(cells[0]));
    for (std::size_t i = 0; i < n; ++i)
      set.strain[i].push_back(parse_double(cells[i + 1]));
  }
  if (set.time.size() >= 2) set.timestep = set.time[1] - set.time[0];
  return set;
}

void write_layout_csv(const std::string& path, const SensorLayout& layout) {
  std::ostringstream out;
  out << "id,x_cm,y_cm\n";
  for (std::size_t i = 0; i < layout.size(); ++i)
    out << layout.ids[i] << ',' << fmt_double(layout.pos_cm[i].x) << ','
        << fmt_double(layout.pos_cm[i].y) << "\n";
  atomic_write_file(path, out.str());
}

SensorLayout read_layout_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::Io, "empty layout file: " + path);
  if (trim(line) != "id,x_cm,y_cm")
    throw Error(ErrorCode::Io, "bad layout header in " + path);
  SensorLayout layout;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != 3)
      throw Error(ErrorCode::Io, "ragged layout row in " + path);
    layout.ids.push_back(static_cast<int>(parse_long(cells[0])));
    layout.pos_cm.push_back({parse_double(cells[1]), parse_double(cells[2])});
  }
  return layout;
}

}  // namespace midas
