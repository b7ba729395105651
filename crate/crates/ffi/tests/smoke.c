#include <stdio.h>
#include <string.h>
#include <math.h>
#include "carleman_coeffs.h"

#define CHECK(cond)                                                  \
    do {                                                             \
        if (!(cond)) {                                               \
            const char *msg = carleman_last_error_message();         \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__,  \
                    #cond, msg ? msg : "no error");                  \
            return 1;                                                \
        }                                                            \
    } while (0)

int main(void) {
    CarlemanTable *t = NULL;
    CHECK(carleman_table_new(12, &t) == CARLEMAN_STATUS_OK);

    size_t len = 0;
    CHECK(carleman_table_len(t, &len) == CARLEMAN_STATUS_OK && len == 12);

    char buf[64];
    size_t needed = 0;
    CHECK(carleman_coefficient_exact(t, 4, buf, sizeof buf, &needed) == CARLEMAN_STATUS_OK);
    CHECK(strcmp(buf, "73/5760") == 0);
    CHECK(carleman_coefficient_exact(t, 4, buf, 3, &needed) == CARLEMAN_STATUS_BUFFER_TOO_SMALL);
    CHECK(needed == 8);

    double b5 = 0.0;
    CHECK(carleman_coefficient_f64(t, 5, &b5) == CARLEMAN_STATUS_OK);
    CarlemanQuadResult q;
    CHECK(carleman_b_quad_g(5, 0.0, &q) == CARLEMAN_STATUS_OK && q.converged);
    CHECK(fabs(q.value - b5) < 1e-12);

    CarlemanGap gap;
    CHECK(carleman_refinement_factor(t, 1.0, 6, NULL, &gap) == CARLEMAN_STATUS_OK);
    CHECK(gap.weighted_e > 2.0 && gap.gap > 0.0);

    CHECK(carleman_coefficient_f64(t, 13, &b5) == CARLEMAN_STATUS_OUT_OF_RANGE);
    CHECK(carleman_last_error_message() != NULL);
    carleman_table_free(t);

    char *json = NULL;
    int32_t code = -1;
    CHECK(carleman_verify_json(20, 8, 1e-10, &json, &code) == CARLEMAN_STATUS_OK);
    CHECK(code == 0 && strstr(json, "\"summary\"") != NULL);
    carleman_string_free(json);

    printf("ok %s\n", carleman_version());
    return 0;
}
