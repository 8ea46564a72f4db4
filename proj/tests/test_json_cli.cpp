#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>

#include "cforge/cli.hpp"
#include "cforge/commdecomp.hpp"
#include "cforge/json_io.hpp"
#include "cforge/rng.hpp"
#include "oracles.hpp"

using namespace cforge;

namespace {

std::filesystem::path tmp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "cforge_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string tmp_file(const std::string& name) {
  return (tmp_dir() / name).string();
}

}  // namespace

TEST_CASE("float formatting is 17 significant digits") {
  CHECK(fmt_double(0.1) == "0.10000000000000001");
  CHECK(fmt_double(1.0) == "1");
  CHECK(fmt_double(-2.5e-17) == "-2.4999999999999999e-17");
}

TEST_CASE("matrix JSON round trip") {
  Rng rng(401);
  MatC m = rng.gmatrix(3, 4);
  JsonBuilder b;
  write_matrix(b, m);
  MatC back = parse_matrix_json(b.str());
  CHECK(opnorm(MatC(back - m)) == 0.0);  // 17 digits reproduce doubles exactly
}

TEST_CASE("certificate report re-verifies from its own JSON alone") {
  Rng rng(411);
  MatC h = gen_trace_zero(rng, 5);
  DecompCertificate cert = two_commutator(h);
  JsonDoc doc(certificate_report(cert));
  MatC target = doc.matrix("target");
  MatC residual = doc.matrix("residual");
  std::vector<std::pair<MatC, MatC>> pairs;
  for (size_t i = 0; i < doc.array_size("pairs"); ++i) {
    JsonDoc p = doc.element("pairs", i);
    pairs.push_back({p.matrix("x"), p.matrix("y")});
  }
  MatC rec = oracle::reconstruct(pairs, residual);
  CHECK(opnorm(MatC(rec - target)) <=
        doc.num("reconstruction_residual") + 1e-12);
}

TEST_CASE("cli round trip: gen then decompose2") {
  const std::string gen_in = tmp_file("gen.json");
  const std::string inst = tmp_file("h.json");
  const std::string report = tmp_file("cert.json");
  write_file(gen_in, "{\"kind\":\"trace_zero\",\"n\":5}");

  RunConfig gen;
  gen.command = "gen";
  gen.input_path = gen_in;
  gen.output_path = inst;
  gen.seed = 42;
  REQUIRE(run(gen) == kExitOk);

  RunConfig dec;
  dec.command = "decompose2";
  dec.input_path = inst;
  dec.output_path = report;
  CHECK(run(dec) == kExitOk);
  JsonDoc doc(read_file(report));
  CHECK(doc.object("summary").integer("bound_checks_failed") == 0);
  CHECK(doc.object("summary").num("reconstruction_residual") < 1e-8);
}

TEST_CASE("cli rejects a trace-one input with exit 2") {
  const std::string inst = tmp_file("trace_one.json");
  JsonBuilder b;
  b.begin_object();
  b.key("h").value(MatC(MatC::Identity(3, 3) / 3.0));
  b.end_object();
  write_file(inst, b.str());
  RunConfig dec;
  dec.command = "decompose2";
  dec.input_path = inst;
  dec.output_path = tmp_file("unused.json");
  CHECK(run(dec) == kExitValidation);
}

TEST_CASE("cli reports are byte-identical across reruns") {
  const std::string gen_in = tmp_file("gen2.json");
  write_file(gen_in, "{\"kind\":\"square_zero_pair\",\"n\":6}");
  for (const char* name : {"a.json", "b.json"}) {
    RunConfig gen;
    gen.command = "gen";
    gen.input_path = gen_in;
    gen.output_path = tmp_file(name);
    gen.seed = 7;
    REQUIRE(run(gen) == kExitOk);
  }
  CHECK(read_file(tmp_file("a.json")) == read_file(tmp_file("b.json")));

  // And the downstream reports as well.
  JsonDoc inst(read_file(tmp_file("a.json")));
  JsonBuilder zin;
  zin.begin_object();
  zin.key("z").value(inst.matrix("a"));
  zin.end_object();
  write_file(tmp_file("z.json"), zin.str());
  for (const char* name : {"r1.json", "r2.json"}) {
    RunConfig nil;
    nil.command = "nilify";
    nil.input_path = tmp_file("z.json");
    nil.output_path = tmp_file(name);
    REQUIRE(run(nil) == kExitOk);
  }
  CHECK(read_file(tmp_file("r1.json")) == read_file(tmp_file("r2.json")));
}

TEST_CASE("manifest fan-out runs every job") {
  const std::string gen_in = tmp_file("gen3.json");
  write_file(gen_in, "{\"kind\":\"trace_zero\",\"n\":4}");
  RunConfig gen;
  gen.command = "gen";
  gen.input_path = gen_in;
  gen.output_path = tmp_file("mh.json");
  gen.seed = 9;
  REQUIRE(run(gen) == kExitOk);

  JsonBuilder m;
  m.begin_object();
  m.key("jobs").begin_array();
  for (const char* out : {"mr1.json", "mr2.json"}) {
    m.begin_object();
    m.key("cmd").value(std::string("decompose2"));
    m.key("in").value(tmp_file("mh.json"));
    m.key("out").value(tmp_file(out));
    m.end_object();
  }
  m.end_array();
  m.end_object();
  write_file(tmp_file("manifest.json"), m.str());

  RunConfig cfg;
  cfg.command = "manifest";
  cfg.input_path = tmp_file("manifest.json");
  CHECK(run(cfg) == kExitOk);
  CHECK(read_file(tmp_file("mr1.json")) == read_file(tmp_file("mr2.json")));
}

TEST_CASE("config validation") {
  RunConfig cfg;
  cfg.command = "decompose2";
  cfg.tol = 1.0;  // out of range
  CHECK(run(cfg) == kExitValidation);
  RunConfig unknown;
  unknown.command = "frobnicate";
  CHECK(run(unknown) == kExitValidation);
}
