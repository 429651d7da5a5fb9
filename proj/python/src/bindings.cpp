#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <sstream>

#include "omegalab/asympt.hpp"
#include "omegalab/census.hpp"
#include "omegalab/config.hpp"
#include "omegalab/error.hpp"
#include "omegalab/partition.hpp"
#include "omegalab/quad.hpp"
#include "omegalab/saddle.hpp"

namespace py = pybind11;
using namespace omegalab;

namespace {

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

// None: all primes; str: path to a partition file; dict: partition JSON.
Partition make_partition(const py::object& source) {
  if (source.is_none()) return Partition::single();
  if (py::isinstance<py::str>(source)) return Partition::load(source.cast<std::string>());
  return Partition::from_json(from_py(source));
}

std::uint64_t to_x(const py::object& x) {
  if (py::isinstance<py::str>(x)) return parse_x(x.cast<std::string>());
  if (py::isinstance<py::int_>(x)) return x.cast<std::uint64_t>();
  return parse_x(py::str(x).cast<std::string>());
}

py::dict census_dict(const CensusTable& t) {
  py::dict d;
  for (const auto& [k, c] : t.counts) d[py::tuple(py::cast(k))] = c;
  return d;
}

/// Prime table and sum cache for one partition.
class Lab {
 public:
  Lab(const py::object& partition, const py::object& cutoff) : partition_(make_partition(partition)) {
    SumCacheOptions opt;
    opt.cutoff = to_x(cutoff);
    table_ = std::make_shared<PrimeTable>(sieve(opt.cutoff));
    if (partition_.kind() == PartitionKind::ap && !partition_.has_ap_constants())
      fit_ap_constants(partition_, *table_);
    cache_ = make_sum_cache(table_, partition_, opt);
  }

  int cells() const { return partition_.cells(); }
  py::object partition() const { return to_py(partition_.to_json()); }

  py::dict census(const py::object& x, int threads) const {
    CensusOptions o;
    o.threads = threads;
    return census_dict(omegalab::census(to_x(x), partition_, o));
  }

  py::object saddle(const py::object& x, const KVector& k) const {
    return to_py(solve_saddle(*cache_, std::log(double(to_x(x))), k).to_json());
  }

  py::object theorem1(const py::object& x, const KVector& k) const {
    return to_py(theorem1_estimate(*cache_, std::log(double(to_x(x))), k).to_json());
  }

  py::object theorem2(const py::object& x, const KVector& k, bool closed_form) const {
    AsymptOptions o;
    o.closed_form = closed_form;
    return to_py(theorem2_estimate(*cache_, std::log(double(to_x(x))), k, o).to_json());
  }

  py::object box_integral(const py::object& x, const KVector& k) const {
    SaddlePoint sp = solve_saddle(*cache_, std::log(double(to_x(x))), k);
    QuadPlan plan = make_quad_plan(sp);
    nlohmann::json j = omegalab::box_integral(sp, *cache_, plan).to_json();
    j["plan"] = plan.to_json();
    return to_py(j);
  }

  std::string compare_csv(const py::object& x, const std::vector<KVector>& grid, double mu) const {
    CompareOptions o;
    o.mu = mu;
    o.theorem2 = partition_.kind() == PartitionKind::ap;
    auto rows = compare(omegalab::census(to_x(x), partition_), *cache_, grid, o);
    std::ostringstream os;
    write_comparison_csv(os, rows);
    return os.str();
  }

 private:
  Partition partition_;
  std::shared_ptr<const PrimeTable> table_;
  std::shared_ptr<SumCache> cache_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Counting integers by distinct prime factors in prime partitions";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());

  m.def("parse_x", &parse_x, py::arg("text"), "Exact integer from decimal or scientific notation.");
  m.def("parse_k_grid", &parse_k_grid, py::arg("text"));
  m.def(
      "census",
      [](const py::object& x, const py::object& partition, int threads) {
        CensusOptions o;
        o.threads = threads;
        return census_dict(census(to_x(x), make_partition(partition), o));
      },
      py::arg("x"), py::arg("partition") = py::none(), py::arg("threads") = 1,
      "Exact counts {k: n} of m <= x by distinct prime factors per cell.");

  py::class_<Lab>(m, "Lab")
      .def(py::init<const py::object&, const py::object&>(), py::arg("partition") = py::none(),
           py::arg("cutoff") = "1e7")
      .def_property_readonly("cells", &Lab::cells)
      .def_property_readonly("partition", &Lab::partition)
      .def("census", &Lab::census, py::arg("x"), py::arg("threads") = 1)
      .def("saddle", &Lab::saddle, py::arg("x"), py::arg("k"))
      .def("theorem1", &Lab::theorem1, py::arg("x"), py::arg("k"))
      .def("theorem2", &Lab::theorem2, py::arg("x"), py::arg("k"), py::arg("closed_form") = false)
      .def("box_integral", &Lab::box_integral, py::arg("x"), py::arg("k"))
      .def("compare_csv", &Lab::compare_csv, py::arg("x"), py::arg("grid"), py::arg("mu") = 2.0);
}
