# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scoring kernels; mirror of ``_pykernels`` (keep in sync)."""

from libc.math cimport sqrt, log, exp, pow


cpdef double visual_weight(double tf, double image_len, double corpus_tf,
                           double corpus_total, double xi):
    return (1.0 - xi) * (tf / image_len) + xi * (corpus_tf / corpus_total)


cpdef double spatial_cost(double q_lat, double q_lon, double lat, double lon,
                          double delta_max):
    cdef double d_lat = q_lat - lat
    cdef double d_lon = q_lon - lon
    return sqrt(d_lat * d_lat + d_lon * d_lon) / delta_max


cpdef double rect_min_cost(double q_lat, double q_lon, double min_lat,
                           double min_lon, double max_lat, double max_lon,
                           double delta_max):
    cdef double d_lat = 0.0
    cdef double d_lon = 0.0
    if q_lat < min_lat:
        d_lat = min_lat - q_lat
    elif q_lat > max_lat:
        d_lat = q_lat - max_lat
    if q_lon < min_lon:
        d_lon = min_lon - q_lon
    elif q_lon > max_lon:
        d_lon = q_lon - max_lon
    return sqrt(d_lat * d_lat + d_lon * d_lon) / delta_max


cpdef double recency_cost(double age_seconds, double decay_base,
                          double time_unit):
    if age_seconds < 0.0:
        age_seconds = 0.0
    return 1.0 - pow(decay_base, -(age_seconds / time_unit))


cpdef double relevance_cost(list weights, list maxima):
    cdef double log_num = 0.0
    cdef double log_den = 0.0
    cdef double w, m, ratio
    cdef Py_ssize_t i, n = len(weights)
    for i in range(n):
        m = maxima[i]
        if m <= 0.0:
            continue
        w = weights[i]
        if w <= 0.0:
            return 1.0
        log_num += log(w)
        log_den += log(m)
    ratio = exp(log_num - log_den)
    if ratio > 1.0:
        ratio = 1.0
    return 1.0 - ratio


cpdef double combine(double w1, double w2, double w3, double f_s, double f_v,
                     double f_t):
    return w1 * f_s + w2 * f_v + w3 * f_t
