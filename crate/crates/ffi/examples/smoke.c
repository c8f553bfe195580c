#include <math.h>
#include <stdio.h>

#include "amplitude_flow.h"

static int fail(const char *what, AflStatus status) {
    const char *msg = afl_last_error();
    fprintf(stderr, "%s: status %d (%s)\n", what, (int)status, msg ? msg : "no message");
    return 1;
}

int main(void) {
    const double pi = 3.14159265358979323846;
    double k_moon, k_qubit, k_partner, residual;
    AflStatus s;

    printf("amplitude-flow %s\n", afl_version());

    if ((s = afl_moon_weight(pi / 4, &k_moon)) != AFL_STATUS_OK) return fail("moon weight", s);

    AflModel *model = NULL;
    if ((s = afl_model_new_jc(1.0, 0.0, &model)) != AFL_STATUS_OK) return fail("model", s);

    AflOracle *oracle = NULL;
    if ((s = afl_oracle_new(model, 0, 0.0, &oracle)) != AFL_STATUS_OK) return fail("oracle", s);

    AflOracleSample sample;
    if ((s = afl_oracle_sample(oracle, pi / 3, 0.7, &sample)) != AFL_STATUS_OK) return fail("sample", s);
    if ((s = afl_closed_form_weights(sample.p, pi / 3, &k_qubit, &k_partner)) != AFL_STATUS_OK)
        return fail("closed form", s);
    if ((s = afl_conservation_residual(sample.k_qubit, sample.k_partner, sample.k_moon, pi / 3, &residual)) !=
        AFL_STATUS_OK)
        return fail("residual", s);

    printf("K_M(pi/4) = %.17g\n", k_moon);
    printf("oracle K_A = %.17g closed K_A = %.17g residual = %.3e\n", sample.k_qubit, k_qubit, residual);

    s = afl_conservation_residual(1.5, 1.5, 1.2, pi / 8, &residual);
    printf("qubit-dominant branch -> status %d: %s\n", (int)s, afl_last_error());

    afl_oracle_free(oracle);
    afl_model_free(model);

    if (k_moon != 2.0 || fabs(sample.k_qubit - k_qubit) > 1e-9 || residual > 1e-7) return 1;
    return s == AFL_STATUS_WRONG_BRANCH ? 0 : 1;
}
