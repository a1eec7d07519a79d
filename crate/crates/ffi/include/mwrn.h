#ifndef MWRN_H
#define MWRN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MwrnStatus {
  MWRN_STATUS_OK = 0,
  MWRN_STATUS_NULL_POINTER = 1,
  MWRN_STATUS_DOMAIN = 2,
  MWRN_STATUS_CONFIG = 3,
  MWRN_STATUS_SCHEDULE = 4,
  MWRN_STATUS_IO = 5,
  MWRN_STATUS_BUFFER_TOO_SMALL = 6,
  MWRN_STATUS_PANIC = 7,
} MwrnStatus;

typedef enum MwrnScheme {
  MWRN_SCHEME_PROPOSED = 0,
  MWRN_SCHEME_CONSECUTIVE = 1,
  MWRN_SCHEME_MIRROR = 2,
} MwrnScheme;

typedef enum MwrnScenario {
  MWRN_SCENARIO_EQUAL = 0,
  MWRN_SCENARIO_UNEQUAL = 1,
  /*
   Gains redrawn every frame.
   */
  MWRN_SCENARIO_VARIABLE = 2,
} MwrnScenario;

/*
 Opaque simulation campaign result.
 */
typedef struct MwrnCampaign MwrnCampaign;

/*
 Opaque coefficient tables for one PAM size.
 */
typedef struct MwrnCoeffTables MwrnCoeffTables;

/*
 Campaign settings. `joint_ml` selects the unconstrained relay detector.
 */
typedef struct MwrnCampaignSpec {
  size_t users;
  size_t frames;
  size_t symbols;
  size_t mod_order;
  enum MwrnScheme scheme;
  enum MwrnScenario scenario;
  uint64_t seed;
  bool joint_ml;
} MwrnCampaignSpec;

/*
 Simulated SER at one SNR point. `common_ser` is NaN for chain schemes.
 */
typedef struct MwrnSimPoint {
  double snr_db;
  double common_ser;
  double other_ser;
  double other_stderr;
  uint64_t other_events;
  bool unreliable;
} MwrnSimPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread, or null. The pointer stays
 valid until the next failing call on the same thread.
 */
const char *mwrn_last_error(void);

/*
 Gaussian tail probability `Q(x)`.
 */
double mwrn_q_function(double x);

/*
 Derives the coefficient tables for `side`-PAM (`side` = sqrt(M)).

 # Safety
 `out` must be a valid pointer to writable storage for one handle.
 */
enum MwrnStatus mwrn_coeff_tables_new(size_t side, struct MwrnCoeffTables **out);

/*
 # Safety
 `tables` must be null or a handle from [`mwrn_coeff_tables_new`] not yet freed.
 */
void mwrn_coeff_tables_free(struct MwrnCoeffTables *tables);

/*
 Relay coefficient `a[p][q][u]` as `num / den`; `u` is odd.

 # Safety
 `tables` must be a live handle; `num` and `den` valid for writes.
 */
enum MwrnStatus mwrn_coeff_a(const struct MwrnCoeffTables *tables,
                             size_t p,
                             size_t q,
                             size_t u,
                             int64_t *num,
                             int64_t *den);

/*
 Probability of a wrong network-coded residue in one PAM dimension.

 # Safety
 `tables` must be a live handle; `out` valid for writes.
 */
enum MwrnStatus mwrn_p_pam_nc(const struct MwrnCoeffTables *tables,
                              double gamma_r,
                              double gamma_user,
                              double *out);

/*
 Writes the `users - 1` slot pairs as `pairs[2k], pairs[2k + 1]`.
 `common` is ignored by chain schemes; pass -1 for none.

 # Safety
 `pairs` must be valid for `len` writes.
 */
enum MwrnStatus mwrn_build_schedule(enum MwrnScheme scheme,
                                    size_t users,
                                    ptrdiff_t common,
                                    size_t *pairs,
                                    size_t len);

/*
 Closed-form average common and sum rate bounds for average gains `sigma2`.

 # Safety
 `sigma2` must hold `users` values; `common_rate` and `sum_rate` valid for writes.
 */
enum MwrnStatus mwrn_rate_bounds(enum MwrnScheme scheme,
                                 const double *sigma2,
                                 size_t users,
                                 double power,
                                 double n0,
                                 bool scaled,
                                 double *common_rate,
                                 double *sum_rate);

/*
 Runs a simulation campaign over `n_snr` SNR points (dB, ascending).

 # Safety
 `spec` must be valid, `snr_db` must hold `n_snr` values and `out` must be
 valid for one handle write.
 */
enum MwrnStatus mwrn_campaign_run(const struct MwrnCampaignSpec *spec,
                                  const double *snr_db,
                                  size_t n_snr,
                                  struct MwrnCampaign **out);

/*
 Number of SNR points in a campaign result; 0 for null.

 # Safety
 `campaign` must be null or a live handle.
 */
size_t mwrn_campaign_len(const struct MwrnCampaign *campaign);

/*
 # Safety
 `campaign` must be a live handle; `out` valid for writes.
 */
enum MwrnStatus mwrn_campaign_point(const struct MwrnCampaign *campaign,
                                    size_t index,
                                    struct MwrnSimPoint *out);

/*
 # Safety
 `campaign` must be null or a handle from [`mwrn_campaign_run`] not yet freed.
 */
void mwrn_campaign_free(struct MwrnCampaign *campaign);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MWRN_H */
