/* C interface to the specular holography library.
 *
 * Objects are opaque handles released with their *_free function. Every call
 * returns an sh_status; on failure sh_last_error() describes the problem for
 * the calling thread. Strings returned through char** are owned by the caller
 * and released with sh_string_free. Angles are in degrees. */
#ifndef SPECHOL_H
#define SPECHOL_H

#include <stddef.h>

#if defined(SPECHOL_BUILDING)
#define SH_API __attribute__((visibility("default")))
#else
#define SH_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sh_status {
  SH_OK = 0,
  SH_INVALID_ARGUMENT = 1,
  SH_PARSE = 2,
  SH_DEGENERATE_AXIS = 3,
  SH_SINGULAR_CONFIGURATION = 4,
  SH_HOST_EVALUATION = 5,
  SH_MISS = 6,
  SH_DOMAIN = 7,
  SH_UNSUPPORTED = 8,
  SH_DEGENERATE_GEOMETRY = 9,
  SH_SHELL_TOO_THIN = 10,
  SH_RESOLUTION = 11,
  SH_COLLISION = 12,
  SH_POLE = 13,
  SH_UNMACHINABLE = 14,
  SH_ENVELOPE = 15,
  SH_IO = 16,
  SH_INTERNAL = 99
} sh_status;

typedef struct sh_scene sh_scene;
typedef struct sh_striping sh_striping;
typedef struct sh_ridging sh_ridging;
typedef struct sh_glintmap sh_glintmap;

SH_API const char* sh_last_error(void);
SH_API const char* sh_status_name(sh_status status);
SH_API void sh_string_free(char* s);

/* Scenes */
SH_API sh_status sh_scene_parse(const char* text, sh_scene** out);
SH_API sh_status sh_scene_load(const char* path, sh_scene** out);
SH_API sh_status sh_scene_print(const sh_scene* scene, char** out);
SH_API size_t sh_scene_stipple_count(const sh_scene* scene);
SH_API void sh_scene_free(sh_scene* scene);

/* Member classification and constants, one line per stipple. */
SH_API sh_status sh_foliate_report(const sh_scene* scene, char** out);

/* Stripings */
SH_API sh_status sh_stripe_build(const sh_scene* scene, sh_striping** out);
SH_API size_t sh_striping_arc_count(const sh_striping* striping);
SH_API size_t sh_striping_rejected_count(const sh_striping* striping);
SH_API sh_status sh_striping_report(const sh_striping* striping, char** out);
SH_API sh_status sh_striping_gcode(const sh_striping* striping, char** out);
SH_API sh_status sh_striping_csv(const sh_striping* striping, char** out);
SH_API void sh_striping_free(sh_striping* striping);

/* Cutter profile able to cut every arc of the striping. */
SH_API sh_status sh_profile_report(const sh_scene* scene, const sh_striping* striping, char** out);
SH_API double sh_orthogonal_tangent_angle_deg(double theta_deg, double alpha_deg);

/* Ridgings: one per stipple, cropped to the stipple's view window. */
SH_API sh_status sh_ridge_build(const sh_scene* scene, sh_ridging** out);
SH_API sh_status sh_ridge_crop(sh_ridging* ridging, double az_min, double az_max, double el_min, double el_max);
SH_API size_t sh_ridging_count(const sh_ridging* ridging);
SH_API sh_status sh_ridge_mesh_obj(const sh_ridging* ridging, char** out);
SH_API sh_status sh_ridging_report(const sh_ridging* ridging, char** out);
SH_API void sh_ridging_free(sh_ridging* ridging);

/* Glint maps over the scene's view path. Either surface may be NULL. */
SH_API sh_status sh_simulate(const sh_scene* scene, const sh_striping* striping, const sh_ridging* ridging,
                             int width, int height, double pixels_per_mm, sh_glintmap** out);
SH_API size_t sh_glintmap_view_count(const sh_glintmap* map);
SH_API sh_status sh_glintmap_report(const sh_glintmap* map, char** out);
SH_API sh_status sh_glintmap_write_frames(const sh_glintmap* map, const char* directory);
SH_API void sh_glintmap_free(sh_glintmap* map);

/* Stereo reconstruction of every stipple from two eyes baseline_deg apart.
 * Uses the ridging when given, else the striping. */
SH_API sh_status sh_triangulate_report(const sh_scene* scene, const sh_striping* striping,
                                       const sh_ridging* ridging, double baseline_deg, char** out);

/* Residual suites. violations receives the number of failed checks. */
enum {
  SH_VERIFY_FOLIATION = 1,
  SH_VERIFY_STRIPING = 2,
  SH_VERIFY_RIDGING = 4,
  SH_VERIFY_ALL = 7
};
SH_API sh_status sh_verify(const sh_scene* scene, unsigned flags, char** report, size_t* violations);

#ifdef __cplusplus
}
#endif

#endif
