#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cconvex/harness.hpp"

namespace cconvex {

namespace {

std::string format_number(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write(std::ostringstream& out, const OrderedJson& v, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (v.type()) {
    case OrderedJson::value_t::object: {
      if (v.empty()) {
        out << "{}";
        return;
      }
      out << '{' << nl;
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out << ',' << nl;
        first = false;
        out << pad << OrderedJson(key).dump() << (indent > 0 ? ": " : ":");
        write(out, item, indent, depth + 1);
      }
      out << nl << close_pad << '}';
      return;
    }
    case OrderedJson::value_t::array: {
      if (v.empty()) {
        out << "[]";
        return;
      }
      // Short numeric arrays (complex numbers) stay on one line.
      const bool inline_array = v.size() <= 2 && std::all_of(v.begin(), v.end(), [](const auto& e) { return e.is_number(); });
      out << '[' << (inline_array ? "" : nl);
      bool first = true;
      for (const auto& item : v) {
        if (!first) out << ',' << (inline_array ? " " : nl);
        first = false;
        if (!inline_array) out << pad;
        write(out, item, indent, depth + 1);
      }
      if (!inline_array) out << nl << close_pad;
      out << ']';
      return;
    }
    case OrderedJson::value_t::number_float:
      out << format_number(v.get<double>());
      return;
    default:
      out << v.dump();
      return;
  }
}

OrderedJson complex_json(Complex c) { return OrderedJson::array({c.real(), c.imag()}); }

OrderedJson vector_json(const ComplexVector& v) {
  OrderedJson a = OrderedJson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_json(v(i)));
  return a;
}

std::string csv_vector(const ComplexVector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ' ';
    out += csv_number(v(i).real()) + ':' + csv_number(v(i).imag());
  }
  return out;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

OrderedJson record_json(const CheckRecord& r) {
  OrderedJson j;
  j["index"] = r.index;
  j["check"] = r.check;
  j["note"] = r.note;
  j["point"] = r.point_index ? OrderedJson(*r.point_index) : OrderedJson(nullptr);
  j["vector"] = r.vector_index ? OrderedJson(*r.vector_index) : OrderedJson(nullptr);
  j["z"] = vector_json(r.z);
  j["x"] = r.x ? vector_json(*r.x) : OrderedJson(nullptr);
  j["lower"] = r.lower;
  j["value"] = r.value;
  j["upper"] = r.upper;
  j["tolerance"] = r.tolerance;
  j["error_bar"] = r.error_bar ? OrderedJson(*r.error_bar) : OrderedJson(nullptr);
  j["pass"] = r.pass;
  if (r.wall_seconds) j["wall_seconds"] = *r.wall_seconds;
  return j;
}

}  // namespace

std::string dump_json(const OrderedJson& value, int indent) {
  std::ostringstream out;
  write(out, value, indent, 0);
  return out.str();
}

std::string report_json(const Report& report) {
  OrderedJson j;
  j["schema_version"] = kReportSchemaVersion;
  j["scenario"] = report.scenario;
  j["domain"] = OrderedJson::parse(report.domain.dump());
  j["domain_hash"] = report.domain_hash;
  OrderedJson numerics;
  numerics["degree"] = report.degree;
  numerics["mode"] = to_string(report.numerics.mode);
  numerics["samples"] = report.numerics.samples;
  numerics["seed"] = report.numerics.seed;
  numerics["inclusion_samples"] = report.numerics.inclusion_samples;
  numerics["tolerances"] = {{"closed_form", report.numerics.tolerances.closed_form},
                            {"sigmas", report.numerics.tolerances.sigmas},
                            {"relative", report.numerics.tolerances.relative}};
  j["numerics"] = numerics;
  const auto failed = std::count_if(report.records.begin(), report.records.end(), [](const auto& r) { return !r.pass; });
  j["summary"] = {{"pass", report.pass()},
                  {"records", report.records.size()},
                  {"failed", failed},
                  {"error", report.error ? OrderedJson(*report.error) : OrderedJson(nullptr)}};
  OrderedJson records = OrderedJson::array();
  for (const auto& r : report.records) records.push_back(record_json(r));
  j["records"] = records;
  return dump_json(j) + "\n";
}

std::string report_csv(const Report& report) {
  std::ostringstream out;
  out << "index,check,note,point,vector,domain_hash,z,x,lower,value,upper,tolerance,error_bar,pass\n";
  for (const auto& r : report.records) {
    out << r.index << ',' << r.check << ',' << csv_quote(r.note) << ','
        << (r.point_index ? std::to_string(*r.point_index) : "") << ','
        << (r.vector_index ? std::to_string(*r.vector_index) : "") << ',' << r.domain_hash << ','
        << csv_vector(r.z) << ',' << (r.x ? csv_vector(*r.x) : "") << ',' << csv_number(r.lower) << ','
        << csv_number(r.value) << ',' << csv_number(r.upper) << ',' << csv_number(r.tolerance) << ','
        << (r.error_bar ? csv_number(*r.error_bar) : "") << ',' << (r.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

void report_emit(const Report& report, const std::filesystem::path& prefix) {
  auto write_file = [](const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) throw std::runtime_error("cannot write " + path.string());
  };
  std::filesystem::path json = prefix, csv = prefix;
  json += ".json";
  csv += ".csv";
  write_file(json, report_json(report));
  write_file(csv, report_csv(report));
}

}  // namespace cconvex
