#include "cforge/json_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace cforge {

using nlohmann::json;

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// JsonBuilder

void JsonBuilder::comma() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (!need_comma_.empty()) {
    if (need_comma_.back()) out_ += ',';
    need_comma_.back() = true;
  }
}

JsonBuilder& JsonBuilder::begin_object() {
  comma();
  out_ += '{';
  need_comma_.push_back(false);
  return *this;
}

JsonBuilder& JsonBuilder::end_object() {
  out_ += '}';
  need_comma_.pop_back();
  return *this;
}

JsonBuilder& JsonBuilder::begin_array() {
  comma();
  out_ += '[';
  need_comma_.push_back(false);
  return *this;
}

JsonBuilder& JsonBuilder::end_array() {
  out_ += ']';
  need_comma_.pop_back();
  return *this;
}

static std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

JsonBuilder& JsonBuilder::key(const std::string& k) {
  comma();
  out_ += '"';
  out_ += escape(k);
  out_ += "\":";
  pending_key_ = true;
  return *this;
}

JsonBuilder& JsonBuilder::value(double x) {
  comma();
  out_ += fmt_double(x);
  return *this;
}

JsonBuilder& JsonBuilder::value(int x) { return value(static_cast<long long>(x)); }

JsonBuilder& JsonBuilder::value(long long x) {
  comma();
  out_ += std::to_string(x);
  return *this;
}

JsonBuilder& JsonBuilder::value(bool x) {
  comma();
  out_ += x ? "true" : "false";
  return *this;
}

JsonBuilder& JsonBuilder::value(const std::string& s) {
  comma();
  out_ += '"';
  out_ += escape(s);
  out_ += '"';
  return *this;
}

JsonBuilder& JsonBuilder::value(Complex z) {
  begin_array();
  value(z.real());
  value(z.imag());
  return end_array();
}

JsonBuilder& JsonBuilder::value(const MatC& m) {
  write_matrix(*this, m);
  return *this;
}

JsonBuilder& JsonBuilder::raw_null() {
  comma();
  out_ += "null";
  return *this;
}

void write_matrix(JsonBuilder& b, const MatC& m) {
  b.begin_object();
  b.key("rows").value(static_cast<long long>(m.rows()));
  b.key("cols").value(static_cast<long long>(m.cols()));
  b.key("entries").begin_array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) b.value(m(i, j));
  b.end_array();
  b.end_object();
}

// ---------------------------------------------------------------------------
// Parsing

struct ParsedDoc {
  json j;
};

static MatC matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
      !j.contains("entries"))
    throw ValidationError("matrix JSON: expected rows/cols/entries object");
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  if (rows < 0 || cols < 0)
    throw ValidationError("matrix JSON: negative dimensions");
  const auto& e = j.at("entries");
  if (!e.is_array() || e.size() != static_cast<size_t>(rows) * cols)
    throw ValidationError("matrix JSON: entry count mismatch");
  MatC m(rows, cols);
  size_t idx = 0;
  for (int i = 0; i < rows; ++i)
    for (int jj = 0; jj < cols; ++jj, ++idx) {
      const auto& pair = e.at(idx);
      if (!pair.is_array() || pair.size() != 2)
        throw ValidationError("matrix JSON: entries must be [re, im] pairs");
      m(i, jj) = Complex(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
  return m;
}

MatC parse_matrix_json(const std::string& text) {
  json j = json::parse(text);
  return matrix_from_json(j);
}

JsonDoc::JsonDoc() : doc_(new ParsedDoc) {}

JsonDoc::JsonDoc(const std::string& text) : doc_(new ParsedDoc) {
  try {
    doc_->j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("JSON parse error: ") + e.what());
  }
}

JsonDoc::~JsonDoc() = default;
JsonDoc::JsonDoc(JsonDoc&&) noexcept = default;
JsonDoc& JsonDoc::operator=(JsonDoc&&) noexcept = default;

static const json& field(const ParsedDoc& d, const std::string& k) {
  if (!d.j.is_object() || !d.j.contains(k))
    throw ValidationError("missing JSON field: " + k);
  return d.j.at(k);
}

bool JsonDoc::has(const std::string& k) const {
  return doc_->j.is_object() && doc_->j.contains(k);
}

double JsonDoc::num(const std::string& k) const {
  return field(*doc_, k).get<double>();
}

double JsonDoc::num_or(const std::string& k, double dflt) const {
  return has(k) ? num(k) : dflt;
}

long long JsonDoc::integer(const std::string& k) const {
  return field(*doc_, k).get<long long>();
}

long long JsonDoc::integer_or(const std::string& k, long long dflt) const {
  return has(k) ? integer(k) : dflt;
}

bool JsonDoc::boolean_or(const std::string& k, bool dflt) const {
  return has(k) ? field(*doc_, k).get<bool>() : dflt;
}

std::string JsonDoc::text(const std::string& k) const {
  return field(*doc_, k).get<std::string>();
}

MatC JsonDoc::matrix(const std::string& k) const {
  return matrix_from_json(field(*doc_, k));
}

std::vector<MatC> JsonDoc::matrix_list(const std::string& k) const {
  const json& arr = field(*doc_, k);
  if (!arr.is_array()) throw ValidationError(k + ": expected an array");
  std::vector<MatC> out;
  for (const auto& e : arr) out.push_back(matrix_from_json(e));
  return out;
}

std::vector<int> JsonDoc::int_list(const std::string& k) const {
  const json& arr = field(*doc_, k);
  if (!arr.is_array()) throw ValidationError(k + ": expected an array");
  std::vector<int> out;
  for (const auto& e : arr) out.push_back(e.get<int>());
  return out;
}

size_t JsonDoc::array_size(const std::string& k) const {
  const json& arr = field(*doc_, k);
  if (!arr.is_array()) throw ValidationError(k + ": expected an array");
  return arr.size();
}

JsonDoc JsonDoc::element(const std::string& k, size_t i) const {
  const json& arr = field(*doc_, k);
  if (!arr.is_array() || i >= arr.size())
    throw ValidationError(k + ": array index out of range");
  JsonDoc out;
  out.doc_->j = arr.at(i);
  return out;
}

JsonDoc JsonDoc::object(const std::string& k) const {
  const json& obj = field(*doc_, k);
  if (!obj.is_object()) throw ValidationError(k + ": expected an object");
  JsonDoc out;
  out.doc_->j = obj;
  return out;
}

std::vector<CuntzVector> JsonDoc::cuntz_vectors(const std::string& k) const {
  const json& arr = field(*doc_, k);
  if (!arr.is_array()) throw ValidationError(k + ": expected an array");
  std::vector<CuntzVector> out;
  for (const auto& vec : arr) {
    if (!vec.is_array()) throw ValidationError(k + ": expected rank arrays");
    CuntzVector v;
    for (const auto& r : vec) {
      if (r.is_string() && r.get<std::string>() == "inf")
        v.ranks.push_back(ExtNat::inf());
      else
        v.ranks.push_back(ExtNat::of(r.get<long long>()));
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<TraceWeight> JsonDoc::trace_weights(const std::string& k) const {
  const json& arr = field(*doc_, k);
  if (!arr.is_array()) throw ValidationError(k + ": expected an array");
  std::vector<TraceWeight> out;
  for (const auto& vec : arr) {
    if (!vec.is_array()) throw ValidationError(k + ": expected weight arrays");
    TraceWeight t;
    for (const auto& w : vec) {
      if (w.is_string() && w.get<std::string>() == "inf")
        t.weights.push_back(std::numeric_limits<double>::infinity());
      else
        t.weights.push_back(w.get<double>());
    }
    t.validate();
    out.push_back(std::move(t));
  }
  return out;
}

PathOfInvertibles JsonDoc::path() const {
  PathOfInvertibles p;
  p.closed = boolean_or("closed", false);
  const json& arr = field(*doc_, "samples");
  if (!arr.is_array()) throw ValidationError("path JSON: samples must be an array");
  for (const auto& s : arr) {
    if (!s.is_object() || !s.contains("t") || !s.contains("value"))
      throw ValidationError("path JSON: samples need t and value");
    p.samples.push_back(
        {s.at("t").get<double>(), matrix_from_json(s.at("value"))});
  }
  return p;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << content;
}

// ---------------------------------------------------------------------------
// Report serializers

void write_bound_checks(JsonBuilder& b, const std::vector<BoundCheck>& checks) {
  b.begin_array();
  for (const auto& c : checks) {
    b.begin_object();
    b.key("name").value(c.name);
    b.key("claimed").value(c.claimed);
    b.key("measured").value(c.measured);
    b.key("pass").value(c.pass);
    b.end_object();
  }
  b.end_array();
}

static void write_cert_body(JsonBuilder& b, const DecompCertificate& cert) {
  b.key("target").value(cert.target);
  b.key("pairs").begin_array();
  for (const auto& [x, y] : cert.pairs) {
    b.begin_object();
    b.key("x").value(x);
    b.key("y").value(y);
    b.end_object();
  }
  b.end_array();
  b.key("residual").value(cert.residual);
  b.key("factor_norms").begin_array();
  for (const auto& [nx, ny] : cert.factor_norms) {
    b.begin_array().value(nx).value(ny).end_array();
  }
  b.end_array();
  b.key("sum_factor_products").value(cert.sum_factor_products());
  b.key("reconstruction_residual").value(cert.reconstruction_residual);
  b.key("bound_checks");
  write_bound_checks(b, cert.bound_checks);
  b.key("all_bounds_pass").value(cert.all_bounds_pass());
}

std::string certificate_report(const DecompCertificate& cert) {
  JsonBuilder b;
  b.begin_object();
  b.key("kind").value(std::string("commutator_certificate"));
  write_cert_body(b, cert);
  b.end_object();
  return b.str();
}

std::string peel_report(const PeelResult& r) {
  JsonBuilder b;
  b.begin_object();
  b.key("kind").value(std::string("hereditary_peel"));
  b.key("pairs").begin_array();
  for (const auto& [z, w] : r.pairs) {
    b.begin_object();
    b.key("z").value(z);
    b.key("w").value(w);
    b.end_object();
  }
  b.end_array();
  b.key("h_tail").value(r.h_tail);
  b.key("bound_checks");
  write_bound_checks(b, r.checks);
  b.end_object();
  return b.str();
}

std::string fack_report(const FackResult& r) {
  JsonBuilder b;
  b.begin_object();
  b.key("kind").value(std::string("fack_engine"));
  b.key("group_count").value(r.group_count);
  b.key("L1").value(r.L1);
  b.key("stage_residuals").begin_array();
  for (double x : r.stage_residuals) b.value(x);
  b.end_array();
  write_cert_body(b, r.cert);
  b.end_object();
  return b.str();
}

std::string rosenblum_report(const RosenblumResult& r, double residual) {
  JsonBuilder b;
  b.begin_object();
  b.key("kind").value(std::string("rosenblum_solve"));
  b.key("b").value(r.b);
  b.key("max_resolvent_left").value(r.max_resolvent_left);
  b.key("max_resolvent_right").value(r.max_resolvent_right);
  b.key("nodes").value(r.nodes);
  b.key("residual").value(residual);
  b.end_object();
  return b.str();
}

std::string nil_parts_report(const NilCommutatorParts& parts, const MatC& z) {
  JsonBuilder b;
  b.begin_object();
  b.key("kind").value(std::string("nilpotent_commutator"));
  b.key("z").value(z);
  b.key("u").value(parts.u);
  b.key("v").value(parts.v);
  b.key("w").value(parts.w);
  b.key("commutator_residual")
      .value(opnorm(z - commutator(parts.u, parts.v)));
  b.key("selfadjoint_residual")
      .value(opnorm(MatC(z + z.adjoint()) -
                    commutator(parts.w.adjoint(), parts.w)));
  b.end_object();
  return b.str();
}

static std::string nil_kind_name(NilKind k) {
  switch (k) {
    case NilKind::DirectNilpotent: return "direct_nilpotent";
    case NilKind::From3Split: return "from_3_split";
    case NilKind::FromBridge: return "from_bridge";
    case NilKind::DelegatedM2M3: return "delegated_m2_m3";
  }
  return "unknown";
}

std::string nil_expand_report(const ExpandReport& rep, const Partition4& p,
                              const MatC& a, const MatC& b0) {
  JsonBuilder b;
  b.begin_object();
  b.key("kind").value(std::string("partition_expand"));
  b.key("a").value(a);
  b.key("b").value(b0);
  b.key("s1").value(p.s1);
  b.key("s2").value(p.s2);
  b.key("grid_size").value(p.dim());
  b.key("delegated_count").value(rep.delegated_count);
  b.key("terms").begin_array();
  for (const auto& t : rep.terms) {
    b.begin_object();
    b.key("idx").begin_array();
    for (int v : t.idx) b.value(v);
    b.end_array();
    b.key("kind").value(nil_kind_name(t.kind));
    b.key("resolved").value(t.resolved);
    b.key("norm").value(opnorm(t.value));
    double sq = 0.0;
    MatC sum_pieces = MatC::Zero(t.value.rows(), t.value.cols());
    for (const auto& piece : t.pieces) {
      sq = std::max(sq, opnorm(MatC(piece.value * piece.value)));
      sum_pieces += piece.value;
    }
    b.key("piece_count").value(static_cast<long long>(t.pieces.size()));
    b.key("max_piece_square_norm").value(sq);
    if (t.resolved)
      b.key("resolution_residual").value(opnorm(t.value - sum_pieces));
    b.end_object();
  }
  b.end_array();
  b.end_object();
  return b.str();
}

static void write_det_value(JsonBuilder& b, const DetValue& v) {
  b.begin_object();
  b.key("raw").value(v.raw);
  b.key("lattice_reduced").value(v.lattice_reduced);
  b.key("nonreal").value(v.nonreal);
  b.end_object();
}

std::string det_report(const DetReport& r) {
  JsonBuilder b;
  b.begin_object();
  b.key("kind").value(std::string("path_determinant"));
  b.key("value");
  write_det_value(b, r.value);
  b.key("refinement_depth").value(r.refinement_depth);
  b.key("segment_log_norms").begin_array();
  for (double x : r.segment_log_norms) b.value(x);
  b.end_array();
  b.end_object();
  return b.str();
}

std::string det_value_report(const DetValue& v) {
  JsonBuilder b;
  b.begin_object();
  b.key("kind").value(std::string("exp_product_determinant"));
  b.key("value");
  write_det_value(b, v);
  b.end_object();
  return b.str();
}

std::string suzuki_report(const MatC& c, const SuzukiStats& s) {
  JsonBuilder b;
  b.begin_object();
  b.key("kind").value(std::string("suzuki_defect"));
  b.key("c").value(c);
  b.key("norm_c").value(s.norm_c);
  b.key("trace_c").value(s.trace_c);
  b.key("N").value(s.N);
  b.end_object();
  return b.str();
}

std::string regroup_report(const RegroupResult& r) {
  JsonBuilder b;
  b.begin_object();
  b.key("kind").value(std::string("regroup_commutators"));
  b.key("M").value(r.M);
  b.key("residual").value(r.residual);
  b.key("tail").value(r.tail);
  b.key("commutators").begin_array();
  for (const auto& [u, v] : r.commutators) {
    b.begin_object();
    b.key("u").value(u);
    b.key("v").value(v);
    b.end_object();
  }
  b.end_array();
  b.end_object();
  return b.str();
}

std::string kernel_report(const KernelResult& r) {
  JsonBuilder b;
  b.begin_object();
  b.key("kind").value(std::string("kernel_membership"));
  b.key("member").value(r.member);
  b.key("delta");
  write_det_value(b, r.delta);
  if (r.certificate) {
    b.key("certificate").begin_object();
    b.key("U").value(r.certificate->U);
    b.key("V").value(r.certificate->V);
    b.key("reconstruction_residual")
        .value(r.certificate->reconstruction_residual);
    b.end_object();
  } else {
    b.key("certificate").raw_null();
  }
  b.end_object();
  return b.str();
}

static void write_cuntz_vector(JsonBuilder& b, const CuntzVector& v) {
  b.begin_array();
  for (const auto& r : v.ranks) {
    if (r.infinite)
      b.value(std::string("inf"));
    else
      b.value(r.n);
  }
  b.end_array();
}

std::string compare_report(const ComparisonVerdict& verdict,
                           const std::vector<UnperforationViolation>& unperf,
                           const std::vector<DivisibilityViolation>& div,
                           double delta, bool delta_found) {
  JsonBuilder b;
  b.begin_object();
  b.key("kind").value(std::string("comparison_suite"));
  b.key("premise_holds").value(verdict.premise_holds);
  b.key("conclusion_holds").value(verdict.conclusion_holds);
  b.key("delta_found").value(delta_found);
  b.key("delta").value(delta);
  b.key("unperforation_violations").begin_array();
  for (const auto& v : unperf) {
    b.begin_object();
    b.key("k").value(v.k);
    b.key("x");
    write_cuntz_vector(b, v.x);
    b.key("y");
    write_cuntz_vector(b, v.y);
    b.end_object();
  }
  b.end_array();
  b.key("divisibility_violations").begin_array();
  for (const auto& v : div) {
    b.begin_object();
    b.key("n").value(v.n);
    b.key("x");
    write_cuntz_vector(b, v.x);
    b.key("x_prime");
    write_cuntz_vector(b, v.x_prime);
    b.end_object();
  }
  b.end_array();
  b.end_object();
  return b.str();
}

std::string matrix_instance(const MatC& m) {
  JsonBuilder b;
  b.begin_object();
  b.key("matrix").value(m);
  b.end_object();
  return b.str();
}

std::string matrix_pair_instance(const MatC& a, const MatC& b0,
                                 const std::string& ka, const std::string& kb) {
  JsonBuilder b;
  b.begin_object();
  b.key(ka).value(a);
  b.key(kb).value(b0);
  b.end_object();
  return b.str();
}

std::string path_instance(const PathOfInvertibles& p) {
  JsonBuilder b;
  b.begin_object();
  b.key("closed").value(p.closed);
  b.key("samples").begin_array();
  for (const auto& [t, v] : p.samples) {
    b.begin_object();
    b.key("t").value(t);
    b.key("value").value(v);
    b.end_object();
  }
  b.end_array();
  b.end_object();
  return b.str();
}

}  // namespace cforge
