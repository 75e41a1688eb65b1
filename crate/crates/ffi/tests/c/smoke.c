#include <math.h>
#include <stdio.h>

#include "dentropy.h"

static int fail(const char *what, DentStatus s) {
    char msg[256];
    dent_last_error(msg, sizeof msg);
    fprintf(stderr, "%s: %s (%s)\n", what, dent_status_message(s), msg);
    return 1;
}

int main(void) {
    const double probs[] = {0.4, 0.25, 0.35};
    DentPmf *pmf = NULL;
    DentStatus s = dent_pmf_new(probs, 3, &pmf);
    if (s != DENT_STATUS_OK) return fail("pmf", s);

    DentKind shannon = {DENT_FAMILY_SHANNON, 0.0, 0.0, 0.0};
    double h = 0.0;
    s = dent_true_entropy(pmf, shannon, &h);
    if (s != DENT_STATUS_OK) return fail("true", s);

    const uint64_t raw[] = {40, 25, 35};
    DentCounts *counts = NULL;
    s = dent_counts_new(raw, 3, &counts);
    if (s != DENT_STATUS_OK) return fail("counts", s);

    DentEstimate est;
    s = dent_estimate(counts, shannon, 0.95, &est);
    if (s != DENT_STATUS_OK) return fail("estimate", s);

    DentKind bad = {DENT_FAMILY_RENYI, 1.0, 0.0, 0.0};
    s = dent_true_entropy(pmf, bad, &h);
    if (s != DENT_STATUS_INVALID_PARAMETER) return fail("renyi alpha=1 accepted", s);
    s = dent_true_entropy(pmf, shannon, &h);

    printf("%.7f %.7f %llu\n", h, est.point, (unsigned long long)est.n);
    dent_counts_free(counts);
    dent_pmf_free(pmf);
    return fabs(h - est.point) < 1e-12 ? 0 : 1;
}
