#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cforge/commdecomp.hpp"
#include "cforge/cucompare.hpp"
#include "cforge/dhsdet.hpp"
#include "cforge/matcore.hpp"
#include "cforge/nildecomp.hpp"

namespace cforge {

// All output floats use 17 significant digits so equal inputs give
// byte-identical reports; parsing uses a standard JSON reader.

std::string fmt_double(double x);

// Small append-style JSON document builder (objects, arrays, scalars) that
// writes numbers through fmt_double.
class JsonBuilder {
 public:
  JsonBuilder& begin_object();
  JsonBuilder& end_object();
  JsonBuilder& begin_array();
  JsonBuilder& end_array();
  JsonBuilder& key(const std::string& k);
  JsonBuilder& value(double x);
  JsonBuilder& value(int x);
  JsonBuilder& value(long long x);
  JsonBuilder& value(bool x);
  JsonBuilder& value(const std::string& s);
  JsonBuilder& value(const MatC& m);
  JsonBuilder& value(Complex z);  // [re, im]
  JsonBuilder& raw_null();

  const std::string& str() const { return out_; }

 private:
  void comma();
  std::string out_;
  std::vector<bool> need_comma_;
  bool pending_key_ = false;
};

// Matrix encoding: {"rows": r, "cols": c, "entries": [[re, im], ...]}
// in row-major order.
void write_matrix(JsonBuilder& b, const MatC& m);

MatC parse_matrix_json(const std::string& text);

// Structured parse helpers over an already-read document (implemented with a
// standard JSON parser inside json_io.cpp; headers stay parser-agnostic).
struct ParsedDoc;
class JsonDoc {
 public:
  explicit JsonDoc(const std::string& text);
  ~JsonDoc();
  JsonDoc(JsonDoc&&) noexcept;
  JsonDoc& operator=(JsonDoc&&) noexcept;

  bool has(const std::string& k) const;
  double num(const std::string& k) const;
  double num_or(const std::string& k, double dflt) const;
  long long integer(const std::string& k) const;
  long long integer_or(const std::string& k, long long dflt) const;
  bool boolean_or(const std::string& k, bool dflt) const;
  std::string text(const std::string& k) const;
  MatC matrix(const std::string& k) const;
  std::vector<MatC> matrix_list(const std::string& k) const;
  std::vector<int> int_list(const std::string& k) const;
  size_t array_size(const std::string& k) const;
  JsonDoc element(const std::string& k, size_t i) const;  // object array entry
  JsonDoc object(const std::string& k) const;             // nested object

  // cucompare-specific payloads.
  std::vector<CuntzVector> cuntz_vectors(const std::string& k) const;
  std::vector<TraceWeight> trace_weights(const std::string& k) const;
  PathOfInvertibles path() const;

 private:
  JsonDoc();
  std::unique_ptr<ParsedDoc> doc_;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Report serializers.
void write_bound_checks(JsonBuilder& b, const std::vector<BoundCheck>& checks);
std::string certificate_report(const DecompCertificate& cert);
std::string peel_report(const PeelResult& r);
std::string fack_report(const FackResult& r);
std::string rosenblum_report(const RosenblumResult& r, double residual);
std::string nil_parts_report(const NilCommutatorParts& parts, const MatC& z);
std::string nil_expand_report(const ExpandReport& rep, const Partition4& p,
                              const MatC& a, const MatC& b);
std::string det_report(const DetReport& r);
std::string det_value_report(const DetValue& v);
std::string suzuki_report(const MatC& c, const SuzukiStats& s);
std::string regroup_report(const RegroupResult& r);
std::string kernel_report(const KernelResult& r);
std::string compare_report(const ComparisonVerdict& verdict,
                           const std::vector<UnperforationViolation>& unperf,
                           const std::vector<DivisibilityViolation>& div,
                           double delta, bool delta_found);
std::string matrix_instance(const MatC& m);
std::string matrix_pair_instance(const MatC& a, const MatC& b,
                                 const std::string& ka, const std::string& kb);
std::string path_instance(const PathOfInvertibles& p);

}  // namespace cforge
