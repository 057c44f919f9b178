#include "table_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace soaksim::cli {

namespace {

[[noreturn]] void bad_number(const std::string& s, const char* kind) {
  throw std::invalid_argument("cannot parse '" + s + "' as " + kind);
}

// Splits text into lines, dropping a trailing empty line.
std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      if (pos < text.size()) out.push_back(text.substr(pos));
      break;
    }
    out.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

[[noreturn]] void bad_line(const std::string& context, std::size_t line_no,
                           const std::string& what) {
  std::ostringstream msg;
  msg << context << ": line " << line_no << ": " << what;
  throw std::invalid_argument(msg.str());
}

struct GridHeader {
  double time_s;
  std::vector<double> layout;
  std::string quantity;
  std::size_t first_data_line;  // index into the line list
};

GridHeader parse_grid_header(const std::vector<std::string>& lines,
                             const char* context) {
  if (lines.size() < 3) throw std::invalid_argument(
      std::string(context) + ": truncated grid header");
  GridHeader h;
  // # time_s <v>
  {
    const std::vector<std::string> tok = split(trim(lines[0]), ' ');
    if (tok.size() != 3 || tok[0] != "#" || tok[1] != "time_s")
      bad_line(context, 1, "expected '# time_s <seconds>'");
    h.time_s = parse_double(tok[2]);
  }
  // # grid <numbers...>
  {
    const std::vector<std::string> tok = split(trim(lines[1]), ' ');
    if (tok.size() < 3 || tok[0] != "#" || tok[1] != "grid")
      bad_line(context, 2, "expected '# grid <layout numbers>'");
    for (std::size_t i = 2; i < tok.size(); ++i)
      h.layout.push_back(parse_double(tok[i]));
  }
  // # quantity <name>
  {
    const std::vector<std::string> tok = split(trim(lines[2]), ' ');
    if (tok.size() != 3 || tok[0] != "#" || tok[1] != "quantity")
      bad_line(context, 3, "expected '# quantity <name>'");
    h.quantity = tok[2];
  }
  h.first_data_line = 3;
  return h;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 12);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
    bad_number(s, "a number");
  return v;
}

std::int64_t parse_i64(const std::string& s) {
  const std::string t = trim(s);
  std::int64_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
    bad_number(s, "an integer");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  const std::string t = trim(s);
  std::uint64_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
    bad_number(s, "an unsigned integer");
  return v;
}

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  const std::size_t b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  const std::size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    std::string piece = line.substr(
        pos, next == std::string::npos ? std::string::npos : next - pos);
    if (sep == ' ') {
      // collapse runs of spaces
      if (!piece.empty()) out.push_back(std::move(piece));
    } else {
      out.push_back(std::move(piece));
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

std::string render_timeseries_csv(const TimeSeries& ts) {
  std::string out = "time_s,released,in_agar,consumed\n";
  for (const TimeSeriesRow& r : ts.rows) {
    out += format_double(r.time_s);
    out += ',';
    out += std::to_string(r.released);
    out += ',';
    out += std::to_string(r.in_agar);
    out += ',';
    out += std::to_string(r.consumed);
    out += '\n';
  }
  return out;
}

TimeSeries parse_timeseries_csv(const std::string& text) {
  const std::vector<std::string> lines = lines_of(text);
  if (lines.empty() || trim(lines[0]) != "time_s,released,in_agar,consumed")
    throw std::invalid_argument("time series: missing header row");
  TimeSeries ts;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::vector<std::string> f = split(lines[i], ',');
    if (f.size() != 4) bad_line("time series", i + 1, "expected 4 columns");
    ts.rows.push_back({parse_double(f[0]), parse_u64(f[1]), parse_u64(f[2]),
                       parse_u64(f[3])});
  }
  return ts;
}

std::string render_count_grid_csv(const Snapshot& snap,
                                  bool consumed_quantity) {
  const std::vector<std::int64_t>& vals =
      consumed_quantity ? snap.consumed : snap.in_agar;
  std::string out;
  out += "# time_s " + format_double(snap.time_s) + '\n';
  out += "# grid " + std::to_string(snap.nx) + ' ' + std::to_string(snap.ny) +
         ' ' + format_double(snap.x0_m) + ' ' + format_double(snap.x1_m) +
         ' ' + format_double(snap.y0_m) + ' ' + format_double(snap.y1_m) +
         '\n';
  out += std::string("# quantity ") +
         (consumed_quantity ? "consumed_count" : "in_agar_count") + '\n';
  for (std::uint32_t iy = 0; iy < snap.ny; ++iy) {
    for (std::uint32_t ix = 0; ix < snap.nx; ++ix) {
      const std::size_t b = static_cast<std::size_t>(iy) * snap.nx + ix;
      if (ix) out += ',';
      out += snap.inside[b] ? std::to_string(vals[b]) : std::string("nan");
    }
    out += '\n';
  }
  return out;
}

std::string render_field_csv(const Field& f) {
  std::string out;
  out += "# time_s " + format_double(f.time_s) + '\n';
  out += "# grid " + std::to_string(f.nr) + ' ' + std::to_string(f.nz) + ' ' +
         format_double(f.dr_m) + ' ' + format_double(f.dz_m) + '\n';
  out += "# quantity concentration_molpm3\n";
  for (std::uint32_t j = 0; j < f.nz; ++j) {
    for (std::uint32_t i = 0; i < f.nr; ++i) {
      if (i) out += ',';
      out += format_double(f.c_molpm3[static_cast<std::size_t>(j) * f.nr + i]);
    }
    out += '\n';
  }
  return out;
}

CountGrid parse_count_grid_csv(const std::string& text) {
  const std::vector<std::string> lines = lines_of(text);
  const GridHeader h = parse_grid_header(lines, "count grid");
  if (h.layout.size() != 6)
    throw std::invalid_argument("count grid: layout needs 6 numbers");
  CountGrid g;
  g.time_s = h.time_s;
  g.nx = static_cast<std::uint32_t>(h.layout[0]);
  g.ny = static_cast<std::uint32_t>(h.layout[1]);
  g.x0_m = h.layout[2];
  g.x1_m = h.layout[3];
  g.y0_m = h.layout[4];
  g.y1_m = h.layout[5];
  g.quantity = h.quantity;
  if (g.nx == 0 || g.ny == 0)
    throw std::invalid_argument("count grid: empty layout");
  g.values.reserve(static_cast<std::size_t>(g.nx) * g.ny);
  std::size_t row = 0;
  for (std::size_t i = h.first_data_line; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::vector<std::string> f = split(lines[i], ',');
    if (f.size() != g.nx)
      bad_line("count grid", i + 1, "expected " + std::to_string(g.nx) +
                                        " columns");
    for (const std::string& cell : f)
      g.values.push_back(trim(cell) == "nan" ? 0 : parse_i64(cell));
    ++row;
  }
  if (row != g.ny)
    throw std::invalid_argument("count grid: expected " +
                                std::to_string(g.ny) + " rows, got " +
                                std::to_string(row));
  return g;
}

Field parse_field_csv(const std::string& text) {
  const std::vector<std::string> lines = lines_of(text);
  const GridHeader h = parse_grid_header(lines, "field grid");
  if (h.layout.size() != 4)
    throw std::invalid_argument("field grid: layout needs 4 numbers");
  Field f;
  f.time_s = h.time_s;
  f.nr = static_cast<std::uint32_t>(h.layout[0]);
  f.nz = static_cast<std::uint32_t>(h.layout[1]);
  f.dr_m = h.layout[2];
  f.dz_m = h.layout[3];
  if (f.nr == 0 || f.nz == 0)
    throw std::invalid_argument("field grid: empty layout");
  f.c_molpm3.reserve(static_cast<std::size_t>(f.nr) * f.nz);
  std::size_t row = 0;
  for (std::size_t i = h.first_data_line; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::vector<std::string> cells = split(lines[i], ',');
    if (cells.size() != f.nr)
      bad_line("field grid", i + 1, "expected " + std::to_string(f.nr) +
                                        " columns");
    for (const std::string& cell : cells)
      f.c_molpm3.push_back(parse_double(cell));
    ++row;
  }
  if (row != f.nz)
    throw std::invalid_argument("field grid: expected " +
                                std::to_string(f.nz) + " rows, got " +
                                std::to_string(row));
  return f;
}

std::string render_solver_series_csv(const std::vector<SolverSeriesRow>& rows) {
  std::string out = "time_s,released_mol,in_agar_mol,consumed_mol,residual_mol\n";
  for (const SolverSeriesRow& r : rows) {
    out += format_double(r.time_s) + ',' + format_double(r.released_mol) +
           ',' + format_double(r.in_agar_mol) + ',' +
           format_double(r.consumed_mol) + ',' + format_double(r.residual_mol) +
           '\n';
  }
  return out;
}

std::vector<SolverSeriesRow> parse_solver_series_csv(const std::string& text) {
  const std::vector<std::string> lines = lines_of(text);
  if (lines.empty() ||
      trim(lines[0]) != "time_s,released_mol,in_agar_mol,consumed_mol,residual_mol")
    throw std::invalid_argument("solver series: missing header row");
  std::vector<SolverSeriesRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::vector<std::string> f = split(lines[i], ',');
    if (f.size() != 5) bad_line("solver series", i + 1, "expected 5 columns");
    rows.push_back({parse_double(f[0]), parse_double(f[1]), parse_double(f[2]),
                    parse_double(f[3]), parse_double(f[4])});
  }
  return rows;
}

std::string render_consumed_rings_csv(const std::vector<double>& ring_mol,
                                      double ring_w_m) {
  std::string out = "ring,r_lo_m,r_hi_m,consumed_mol\n";
  for (std::size_t i = 0; i < ring_mol.size(); ++i) {
    out += std::to_string(i) + ',' +
           format_double(ring_w_m * static_cast<double>(i)) + ',' +
           format_double(ring_w_m * static_cast<double>(i + 1)) + ',' +
           format_double(ring_mol[i]) + '\n';
  }
  return out;
}

std::string render_ledger_csv(const std::vector<ConsumptionEvent>& events) {
  std::string out = "time_s,x_m,y_m\n";
  for (const ConsumptionEvent& e : events)
    out += format_double(e.time_s) + ',' + format_double(e.x_m) + ',' +
           format_double(e.y_m) + '\n';
  return out;
}

AreaSeries parse_area_series_csv(const std::string& text,
                                 const std::string& label) {
  AreaSeries series;
  series.label = label;
  const std::vector<std::string> lines = lines_of(text);
  bool saw_data = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::vector<std::string> tok = split(line, ' ');
      if (tok.size() == 3 && tok[1] == "volume_m3")
        series.droplet_volume_m3 = parse_double(tok[2]);
      continue;
    }
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 2)
      bad_line(label, i + 1, "expected 'time,area' with 2 columns");
    if (!saw_data) {
      // tolerate one header row
      try {
        parse_double(f[0]);
      } catch (const std::invalid_argument&) {
        continue;
      }
    }
    double t = 0.0;
    double a = 0.0;
    try {
      t = parse_double(f[0]);
      a = parse_double(f[1]);
    } catch (const std::invalid_argument& e) {
      bad_line(label, i + 1, e.what());
    }
    series.samples.push_back({t, a});
    saw_data = true;
  }
  return series;
}

}  // namespace soaksim::cli
