#include "csofp/csofp.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "csofp/config.hpp"
#include "csofp/errors.hpp"
#include "csofp/runs.hpp"

struct csofp_operator {
  csofp::OperatorConfig config;
};

namespace {

thread_local std::string last_error;

csofp_status fail(csofp_status status, const char* message) {
  last_error = message;
  return status;
}

template <typename Body>
csofp_status guarded(Body&& body) {
  try {
    last_error.clear();
    body();
    return CSOFP_OK;
  } catch (const csofp::Error& e) {
    switch (e.kind()) {
      case csofp::ErrorKind::InvalidArgument:
        return fail(CSOFP_INVALID_ARGUMENT, e.what());
      case csofp::ErrorKind::Precondition:
        return fail(CSOFP_PRECONDITION, e.what());
      case csofp::ErrorKind::Convergence:
        return fail(CSOFP_CONVERGENCE, e.what());
    }
    return fail(CSOFP_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CSOFP_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CSOFP_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw csofp::InvalidArgument(std::string(what) + " must not be NULL");
}

csofp::OperatorChoice to_choice(const csofp_operator_choice& c) {
  csofp::OperatorChoice out;
  if (c.has_pin) out.pin = csofp::Complex(c.pin_re, c.pin_im);
  if (c.has_project) out.project = c.project;
  return out;
}

csofp::GoldenOptions to_golden(const csofp_golden_request* req) {
  require(req, "request");
  csofp::GoldenOptions o;
  o.depth = req->depth;
  o.radius = req->radius;
  o.tol = req->tol;
  o.samples = req->samples;
  o.seed = req->seed;
  o.n = req->n;
  o.threads = req->threads;
  if (req->csv_path != nullptr) o.csv_path = req->csv_path;
  return o;
}

template <typename Run>
csofp_status emit(char** report, Run&& run) {
  return guarded([&] {
    require(report, "report");
    *report = dup_string(run());
  });
}

}  // namespace

extern "C" {

const char* csofp_version(void) { return "0.1.0"; }

const char* csofp_last_error(void) { return last_error.c_str(); }

void csofp_string_free(char* s) { std::free(s); }

csofp_status csofp_operator_parse(const char* json, csofp_operator** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new csofp_operator{csofp::parse_config(json)};
  });
}

csofp_status csofp_operator_load(const char* path, csofp_operator** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new csofp_operator{csofp::load_config(path)};
  });
}

void csofp_operator_free(csofp_operator* op) { delete op; }

size_t csofp_operator_length(const csofp_operator* op) { return op ? op->config.terms.size() : 0; }

double csofp_operator_radius(const csofp_operator* op) { return op ? op->config.radius : 0.0; }

csofp_status csofp_operator_to_json(const csofp_operator* op, char** out) {
  return guarded([&] {
    require(op, "operator");
    require(out, "out");
    *out = dup_string(csofp::serialize_config(op->config));
  });
}

csofp_status csofp_operator_pinned(const csofp_operator* op, double c_re, double c_im, csofp_operator** out) {
  return guarded([&] {
    require(op, "operator");
    require(out, "out");
    const csofp::Complex c(c_re, c_im);
    if (!csofp::is_finite(c)) throw csofp::InvalidArgument("pin point must be finite");
    const csofp::AffineCso T = csofp::pinned(csofp::to_operator(op->config), c);
    *out = new csofp_operator{
        csofp::from_operator(T, op->config.radius, op->config.mu, op->config.truncation)};
  });
}

csofp_status csofp_basis_image_norm(const csofp_operator* op, size_t n, double radius, double* out) {
  return guarded([&] {
    require(op, "operator");
    require(out, "out");
    if (!(radius > 0.0)) throw csofp::InvalidArgument("radius must be positive");
    *out = csofp::basis_image_norm(csofp::to_operator(op->config), n, radius);
  });
}

void csofp_diagnose_request_init(csofp_diagnose_request* req) {
  if (req == nullptr) return;
  *req = csofp_diagnose_request{};
  req->radius = 0.0;
  req->n_max = csofp::kDefaultRatioCount;
  req->m_max = 50;
}

csofp_status csofp_diagnose(const csofp_operator* op, const csofp_diagnose_request* req, char** report) {
  return emit(report, [&] {
    require(op, "operator");
    require(req, "request");
    csofp::DiagnoseOptions o;
    if (req->radius > 0.0) o.radius = req->radius;
    o.n_max = req->n_max;
    o.m_max = req->m_max;
    o.choice = to_choice(req->choice);
    return csofp::run_diagnose(op->config, o);
  });
}

void csofp_fixpoint_request_init(csofp_fixpoint_request* req) {
  if (req == nullptr) return;
  *req = csofp_fixpoint_request{};
  const csofp::FixpointOptions d;
  req->seed = CSOFP_SEED_LOG;
  req->order = d.order;
  req->route = CSOFP_ROUTE_AUTO;
  req->tol = d.tol;
  req->k_max = d.k_max;
  req->max_iter = d.max_iter;
}

csofp_status csofp_fixpoint(const csofp_operator* op, const csofp_fixpoint_request* req, char** report) {
  return emit(report, [&] {
    require(op, "operator");
    require(req, "request");
    csofp::FixpointOptions o;
    switch (req->seed) {
      case CSOFP_SEED_LOG:
        o.seed = csofp::SeedKind::Log;
        break;
      case CSOFP_SEED_POLE:
        o.seed = csofp::SeedKind::Pole;
        break;
      default:
        throw csofp::InvalidArgument("unknown seed kind");
    }
    o.index = req->index;
    o.order = req->order;
    switch (req->route) {
      case CSOFP_ROUTE_AUTO:
        o.route = csofp::RouteChoice::Auto;
        break;
      case CSOFP_ROUTE_DIRECT:
        o.route = csofp::RouteChoice::Direct;
        break;
      case CSOFP_ROUTE_GENERALIZED:
        o.route = csofp::RouteChoice::Generalized;
        break;
      case CSOFP_ROUTE_DERIVATIVE:
        o.route = csofp::RouteChoice::Derivative;
        break;
      default:
        throw csofp::InvalidArgument("unknown route");
    }
    o.m = req->m;
    o.choice = to_choice(req->choice);
    if (req->radius > 0.0) o.radius = req->radius;
    if (!(req->tol > 0.0)) throw csofp::InvalidArgument("tol must be positive");
    o.tol = req->tol;
    o.k_max = req->k_max;
    o.max_iter = req->max_iter;
    return csofp::run_fixpoint(op->config, o);
  });
}

csofp_status csofp_polyfix(const csofp_operator* op, size_t m_max, char** report) {
  return emit(report, [&] {
    require(op, "operator");
    return csofp::run_polyfix(op->config, {m_max});
  });
}

void csofp_golden_request_init(csofp_golden_request* req) {
  if (req == nullptr) return;
  const csofp::GoldenOptions d;
  *req = csofp_golden_request{};
  req->depth = d.depth;
  req->radius = d.radius;
  req->tol = d.tol;
  req->samples = d.samples;
  req->seed = d.seed;
  req->n = d.n;
  req->threads = d.threads;
  req->csv_path = nullptr;
}

csofp_status csofp_golden_fp(const csofp_golden_request* req, char** report) {
  return emit(report, [&] { return csofp::run_golden_fp(to_golden(req)); });
}

csofp_status csofp_golden_identity(const csofp_golden_request* req, char** report) {
  return emit(report, [&] { return csofp::run_golden_identity(to_golden(req)); });
}

csofp_status csofp_golden_figure(const csofp_golden_request* req, char** report) {
  return emit(report, [&] { return csofp::run_golden_figure(to_golden(req)); });
}

csofp_status csofp_golden_sfs(const csofp_golden_request* req, char** report) {
  return emit(report, [&] { return csofp::run_golden_sfs(to_golden(req)); });
}

}  // extern "C"
