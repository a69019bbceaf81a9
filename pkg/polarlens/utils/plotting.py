"""Raster line plots of sweep curves drawn with Pillow."""
import logging
import math

import numpy as np
from PIL import Image, ImageDraw

logger = logging.getLogger(__name__)

SIZE = (640, 420)
MARGIN = (70, 30, 30, 50)  # left, top, right, bottom
BACKGROUND = (255, 255, 255)
AXIS = (40, 40, 40)
MEAN = (31, 119, 180)
BAND = (198, 219, 239)
SCENE_COLORS = ((255, 127, 14), (44, 160, 44), (214, 39, 40), (148, 103, 189), (140, 86, 75))


class _Frame:
    """Maps data coordinates into the plotting area"""

    def __init__(self, xs, ys):
        x_lo, x_hi = min(xs), max(xs)
        y_lo, y_hi = min(ys), max(ys)
        if x_hi == x_lo:
            x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
        if y_hi == y_lo:
            y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
        pad = 0.05 * (y_hi - y_lo)
        self.x_range = (x_lo, x_hi)
        self.y_range = (y_lo - pad, y_hi + pad)
        left, top, right, bottom = MARGIN
        self.box = (left, top, SIZE[0] - right, SIZE[1] - bottom)

    def __call__(self, x, y):
        left, top, right, bottom = self.box
        fx = (x - self.x_range[0]) / (self.x_range[1] - self.x_range[0])
        fy = (y - self.y_range[0]) / (self.y_range[1] - self.y_range[0])
        return left + fx * (right - left), bottom - fy * (bottom - top)


def _dashed(draw, points, fill, dash=6):
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        length = math.hypot(x1 - x0, y1 - y0)
        steps = max(1, int(length // dash))
        for i in range(0, steps, 2):
            a, b = i / steps, min(1.0, (i + 1) / steps)
            draw.line([(x0 + a * (x1 - x0), y0 + a * (y1 - y0)),
                       (x0 + b * (x1 - x0), y0 + b * (y1 - y0))], fill=fill, width=1)


def _axes(draw, frame, xlabel, ylabel, title):
    left, top, right, bottom = frame.box
    draw.rectangle([left, top, right, bottom], outline=AXIS)
    for value in np.linspace(*frame.x_range, 5):
        x, _ = frame(value, frame.y_range[0])
        draw.line([(x, bottom), (x, bottom + 4)], fill=AXIS)
        draw.text((x - 12, bottom + 6), f'{value:.3g}', fill=AXIS)
    for value in np.linspace(*frame.y_range, 5):
        _, y = frame(frame.x_range[0], value)
        draw.line([(left - 4, y), (left, y)], fill=AXIS)
        draw.text((4, y - 6), f'{value:.4g}', fill=AXIS)
    draw.text(((left + right) // 2 - 40, SIZE[1] - 18), xlabel, fill=AXIS)
    draw.text((4, 6), f'{ylabel}  |  {title}', fill=AXIS)


def plot_sweep(result, family, metric, path, reference='ground-truth'):
    """Mean +/- std across scenes as a shaded band, scenes as dashed lines"""
    curve = result.mean_curve(family, reference, metric)
    series = result.series(family, reference, metric)
    if not curve:
        logger.warning('no %s data for %s vs %s, plot skipped', metric, family, reference)
        return None
    numeric = {scene: [(p, float(v)) for p, v in points if v != 'identical']
               for scene, points in series.items()}
    xs = [p for p, _, _ in curve]
    ys = [m - s for _, m, s in curve] + [m + s for _, m, s in curve]
    ys += [v for points in numeric.values() for _, v in points]
    frame = _Frame(xs, ys)

    image = Image.new('RGB', SIZE, BACKGROUND)
    draw = ImageDraw.Draw(image)
    band = [frame(p, m + s) for p, m, s in curve] + [frame(p, m - s) for p, m, s in reversed(curve)]
    if len(curve) > 1:
        draw.polygon(band, fill=BAND)
    for i, (scene, points) in enumerate(numeric.items()):
        color = SCENE_COLORS[i % len(SCENE_COLORS)]
        _dashed(draw, [frame(p, v) for p, v in points], color)
        draw.text((frame.box[2] - 150, frame.box[1] + 4 + 12 * i), scene, fill=color)
    mean_points = [frame(p, m) for p, m, _ in curve]
    if len(mean_points) > 1:
        draw.line(mean_points, fill=MEAN, width=2)
    for x, y in mean_points:
        draw.ellipse([x - 3, y - 3, x + 3, y + 3], fill=MEAN)
    xlabel = 't' if family == 'interpolation' else 'sigma'
    _axes(draw, frame, xlabel, 'PSNR [dB]' if metric == 'psnr_db' else 'SSIM', f'{family} vs {reference}')

    image.save(path, format='PNG')
    logger.info('plot written to %s', path)
    return path


def plot_profiles(profiles, path, pitch):
    """Normalized center-row intensity profiles keyed by label"""
    image = Image.new('RGB', SIZE, BACKGROUND)
    draw = ImageDraw.Draw(image)
    n = len(next(iter(profiles.values())))
    axis_mm = (np.arange(n) - n // 2) * pitch * 1e3
    frame = _Frame([axis_mm[0], axis_mm[-1]], [0.0, 1.0])
    for i, (label, profile) in enumerate(profiles.items()):
        color = SCENE_COLORS[i % len(SCENE_COLORS)]
        draw.line([frame(x, v) for x, v in zip(axis_mm, profile)], fill=color, width=1)
        draw.text((frame.box[2] - 150, frame.box[1] + 4 + 12 * i), label, fill=color)
    _axes(draw, frame, 'x [mm]', 'I / max', 'sensor-plane center row')
    image.save(path, format='PNG')
    logger.info('plot written to %s', path)
    return path
