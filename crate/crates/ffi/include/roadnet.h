#ifndef ROADNET_H
#define ROADNET_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RoadnetStatus {
  ROADNET_STATUS_OK = 0,
  ROADNET_STATUS_NULL_ARGUMENT = 1,
  /*
   Unreadable or malformed input: files, rasters, GeoJSON, strings.
   */
  ROADNET_STATUS_INPUT = 2,
  ROADNET_STATUS_CONFIG = 3,
  /*
   A pipeline stage or computation failed.
   */
  ROADNET_STATUS_STAGE = 4,
  ROADNET_STATUS_INVALID_ARGUMENT = 5,
  ROADNET_STATUS_PANIC = 6,
} RoadnetStatus;

typedef struct RoadnetConfig RoadnetConfig;

typedef struct RoadnetGraph RoadnetGraph;

typedef struct RoadnetMask RoadnetMask;

/*
 Evaluation counts and metrics; undefined metrics are NaN.
 */
typedef struct RoadnetEvalSummary {
  size_t true_positives;
  size_t false_positives;
  size_t false_negatives;
  double precision;
  double recall;
  double f1;
  double avg_hausdorff;
  /*
   Kilometers.
   */
  double gt_length;
} RoadnetEvalSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. Valid until the
 next call into the library.
 */
const char *roadnet_last_error(void);

/*
 Library version string (static).
 */
const char *roadnet_version(void);

/*
 Mask from `width * height` row-major class labels (0 other, 1 interior,
 2 contour). `transform` holds the six world-file values in file order:
 pixel width, row rotation, column rotation, pixel height, and the center
 of the upper-left pixel.

 # Safety
 `labels` must point to `width * height` bytes, `transform` to 6 doubles.
 */
enum RoadnetStatus roadnet_mask_new(size_t width,
                                    size_t height,
                                    const uint8_t *labels,
                                    const double *transform,
                                    struct RoadnetMask **out);

/*
 Load a mask image (PNG/PGM) and its world file.

 # Safety
 Paths must be nul-terminated strings; `out` must be writable.
 */
enum RoadnetStatus roadnet_mask_load(const char *pixel_path,
                                     const char *worldfile_path,
                                     struct RoadnetMask **out);

/*
 # Safety
 `mask` must come from this library or be null.
 */
void roadnet_mask_free(struct RoadnetMask *mask);

/*
 Parse a JSON config; null `json` gives the defaults.

 # Safety
 `json` must be null or a nul-terminated string; `out` must be writable.
 */
enum RoadnetStatus roadnet_config_from_json(const char *json, struct RoadnetConfig **out);

/*
 # Safety
 `cfg` must come from this library or be null.
 */
void roadnet_config_free(struct RoadnetConfig *cfg);

/*
 Vectorize a mask. A null `cfg` uses the defaults.

 # Safety
 Handles must come from this library; `out` must be writable.
 */
enum RoadnetStatus roadnet_reconstruct(const struct RoadnetMask *mask,
                                       const struct RoadnetConfig *cfg,
                                       struct RoadnetGraph **out);

/*
 Synthetic scene from the `synth` section of `cfg` (null for defaults):
 its mask and ground-truth network. Either output may be null.

 # Safety
 Non-null outputs must be writable.
 */
enum RoadnetStatus roadnet_synth(uint64_t seed,
                                 const struct RoadnetConfig *cfg,
                                 struct RoadnetMask **mask_out,
                                 struct RoadnetGraph **truth_out);

/*
 # Safety
 `json` must be a nul-terminated string; `out` must be writable.
 */
enum RoadnetStatus roadnet_graph_from_geojson(const char *json, struct RoadnetGraph **out);

/*
 GeoJSON text of a graph; release with [`roadnet_string_free`].

 # Safety
 `graph` must come from this library; `out` must be writable.
 */
enum RoadnetStatus roadnet_graph_to_geojson(const struct RoadnetGraph *graph, char **out);

/*
 # Safety
 `s` must come from this library or be null.
 */
void roadnet_string_free(char *s);

/*
 Number of nodes; 0 for null.

 # Safety
 `graph` must come from this library or be null.
 */
size_t roadnet_graph_node_count(const struct RoadnetGraph *graph);

/*
 Number of edges; 0 for null.

 # Safety
 `graph` must come from this library or be null.
 */
size_t roadnet_graph_edge_count(const struct RoadnetGraph *graph);

/*
 Total edge length in meters; 0 for null.

 # Safety
 `graph` must come from this library or be null.
 */
double roadnet_graph_total_length(const struct RoadnetGraph *graph);

/*
 # Safety
 `graph` must come from this library or be null.
 */
void roadnet_graph_free(struct RoadnetGraph *graph);

/*
 Buffered evaluation of `pred` against `truth`. A non-positive `buffer`
 uses the default of 2 m.

 # Safety
 Handles must come from this library; `out` must be writable.
 */
enum RoadnetStatus roadnet_evaluate(const struct RoadnetGraph *pred,
                                    const struct RoadnetGraph *truth,
                                    double buffer,
                                    struct RoadnetEvalSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROADNET_H */
