/* C interface to the csofp library: affine composition sum operators and
 * their singular fixed points.
 *
 * Every call returns a csofp_status. On failure csofp_last_error() describes
 * the problem; the message is thread-local and valid until the next call on
 * the same thread. Strings handed out by the library are released with
 * csofp_string_free. Indices are 0-based. */
#ifndef CSOFP_CSOFP_H
#define CSOFP_CSOFP_H

#include <stddef.h>
#include <stdint.h>

#if defined(CSOFP_BUILDING_LIBRARY)
#define CSOFP_API __attribute__((visibility("default")))
#else
#define CSOFP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum csofp_status {
  CSOFP_OK = 0,
  CSOFP_INVALID_ARGUMENT = 1,
  CSOFP_PRECONDITION = 2,
  CSOFP_CONVERGENCE = 3,
  CSOFP_INTERNAL = 4
} csofp_status;

typedef struct csofp_operator csofp_operator;

CSOFP_API const char* csofp_version(void);
CSOFP_API const char* csofp_last_error(void);
CSOFP_API void csofp_string_free(char* s);

/* Operator handles built from the JSON config format. */
CSOFP_API csofp_status csofp_operator_parse(const char* json, csofp_operator** out);
CSOFP_API csofp_status csofp_operator_load(const char* path, csofp_operator** out);
CSOFP_API void csofp_operator_free(csofp_operator* op);
CSOFP_API size_t csofp_operator_length(const csofp_operator* op);
CSOFP_API double csofp_operator_radius(const csofp_operator* op);
CSOFP_API csofp_status csofp_operator_to_json(const csofp_operator* op, char** out);
/* T f - (T f)(c), keeping the radius, mu and truncation of op. */
CSOFP_API csofp_status csofp_operator_pinned(const csofp_operator* op, double c_re, double c_im,
                                             csofp_operator** out);

/* ||T Z_n||_R */
CSOFP_API csofp_status csofp_basis_image_norm(const csofp_operator* op, size_t n, double radius, double* out);

/* Operator selection shared by diagnose and fixpoint requests. */
typedef struct csofp_operator_choice {
  int has_pin;
  double pin_re, pin_im;
  int has_project;
  size_t project;
} csofp_operator_choice;

typedef struct csofp_diagnose_request {
  double radius; /* <= 0: use the config radius */
  size_t n_max;
  size_t m_max;
  csofp_operator_choice choice;
} csofp_diagnose_request;

CSOFP_API void csofp_diagnose_request_init(csofp_diagnose_request* req);
CSOFP_API csofp_status csofp_diagnose(const csofp_operator* op, const csofp_diagnose_request* req, char** report);

typedef enum csofp_seed_kind { CSOFP_SEED_LOG = 0, CSOFP_SEED_POLE = 1 } csofp_seed_kind;

typedef enum csofp_route {
  CSOFP_ROUTE_AUTO = 0,
  CSOFP_ROUTE_DIRECT = 1,
  CSOFP_ROUTE_GENERALIZED = 2,
  CSOFP_ROUTE_DERIVATIVE = 3
} csofp_route;

typedef struct csofp_fixpoint_request {
  csofp_seed_kind seed;
  size_t index; /* the seed sits at the fixed point of this map */
  int order;    /* pole order */
  csofp_route route;
  size_t m; /* derivative order, 0 picks the smallest contracting one */
  csofp_operator_choice choice;
  double radius; /* <= 0: use the config radius */
  double tol;
  size_t k_max;
  size_t max_iter;
} csofp_fixpoint_request;

CSOFP_API void csofp_fixpoint_request_init(csofp_fixpoint_request* req);
CSOFP_API csofp_status csofp_fixpoint(const csofp_operator* op, const csofp_fixpoint_request* req, char** report);

CSOFP_API csofp_status csofp_polyfix(const csofp_operator* op, size_t m_max, char** report);

typedef struct csofp_golden_request {
  size_t depth;
  double radius;
  double tol;
  size_t samples;
  uint64_t seed;
  size_t n; /* sfs */
  unsigned threads;
  const char* csv_path; /* figure; NULL keeps the rows in the report */
} csofp_golden_request;

CSOFP_API void csofp_golden_request_init(csofp_golden_request* req);
CSOFP_API csofp_status csofp_golden_fp(const csofp_golden_request* req, char** report);
CSOFP_API csofp_status csofp_golden_identity(const csofp_golden_request* req, char** report);
CSOFP_API csofp_status csofp_golden_figure(const csofp_golden_request* req, char** report);
CSOFP_API csofp_status csofp_golden_sfs(const csofp_golden_request* req, char** report);

#ifdef __cplusplus
}
#endif

#endif /* CSOFP_CSOFP_H */
