#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bbbvote/errors.hpp"
#include "bbbvote/group.hpp"
#include "bbbvote/harness.hpp"
#include "bbbvote/transcript.hpp"

namespace py = pybind11;
using namespace bbbvote;

namespace {

py::dict params_info(const std::string& backend, const std::string& profile, unsigned n,
                     unsigned k) {
  const auto p = derive_params(parse_backend(backend), parse_profile(profile), n, k);
  py::dict d;
  d["name"] = p->name;
  d["n"] = p->n;
  d["k"] = p->k;
  d["m"] = p->m;
  d["order_bits"] = mpz_sizeinbase(p->generator_order.get_mpz_t(), 2);
  d["unique_decoding"] = p->unique_decoding;
  return d;
}

// Reports cross the boundary as JSON text; the Python side decodes it.
std::string run(const std::string& text, const std::string& name,
                const std::optional<std::string>& out_dir) {
  Scenario s = parse_scenario(text, name);
  py::gil_scoped_release release;
  return report_json(run_scenario(s, out_dir));
}

py::dict verify(const std::string& text) {
  TranscriptCheck c;
  {
    py::gil_scoped_release release;
    c = verify_transcript_text(text);
  }
  py::dict d;
  d["accepted"] = c.accepted;
  d["bad_record"] = c.bad_record ? py::cast(*c.bad_record) : py::none();
  d["reason"] = c.reason;
  d["records"] = c.records;
  d["final_phase"] = to_string(c.final_phase);
  d["result"] = c.result ? py::cast(*c.result) : py::none();
  return d;
}

std::string bench(const std::vector<std::uint32_t>& n_list, const std::vector<unsigned>& k_list,
                  unsigned workers, const std::string& backend) {
  BenchOptions opts;
  opts.n_list = n_list;
  opts.k_list = k_list;
  opts.workers = workers;
  opts.backend = parse_backend(backend);
  py::gil_scoped_release release;
  return bench_json(opts, bench_tally(opts));
}

}  // namespace

PYBIND11_MODULE(_bbbvote, m) {
  py::register_exception<Error>(m, "Error", PyExc_ValueError);
  m.def("params_info", &params_info, py::arg("backend"), py::arg("profile"), py::arg("n"),
        py::arg("k"));
  m.def("run_scenario_text", &run, py::arg("text"), py::arg("name") = "scenario",
        py::arg("out_dir") = py::none());
  m.def("verify_transcript_text", &verify, py::arg("text"));
  m.def("bench_tally_json", &bench, py::arg("n_list"), py::arg("k_list"), py::arg("workers"),
        py::arg("backend"));
}
