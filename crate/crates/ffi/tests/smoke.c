#include "patchscope.h"
#include <stdio.h>
#include <string.h>

int main(void) {
    PsCone *cone = NULL;
    if (ps_cone_new("lorentz", "1,0,0", &cone) != PS_STATUS_OK) return 1;
    int member = -1;
    if (ps_cone_contains(cone, "1,2,0", &member) != PS_STATUS_OK || member != 0) return 2;
    size_t dim = 0;
    if (ps_cone_face_dim(cone, "1,1,0", &dim) != PS_STATUS_OK || dim != 1) return 3;
    if (ps_cone_face_dim(cone, "1,0,0", &dim) != PS_STATUS_DOMAIN) return 4;
    if (strlen(ps_last_error()) == 0) return 5;
    ps_cone_free(cone);

    PsBody *ball = NULL;
    if (ps_body_from_gallery("unit_ball", &ball) != PS_STATUS_OK || ps_body_dim(ball) != 3) return 6;
    double x[3] = {2.0, 0.0, 0.0}, p[3];
    if (ps_body_project(ball, x, 3, p) != PS_STATUS_OK || p[0] < 0.999 || p[0] > 1.001) return 7;
    ps_body_free(ball);
    printf("ok %s\n", ps_version());
    return 0;
}
