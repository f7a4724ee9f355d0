import { describe, expect, it } from 'vitest';

import { countXTicks, hasLegend, renderChart } from '../src/chart.js';
import { sizeClassForWidth } from '../src/sizeclass.js';
import type { ChartSpec, SizeClass } from '../src/types.js';

const SIZE_VARIANTS: ChartSpec['sizeVariants'] = {
  narrow: { maxTicks: 4, legendVisible: false, labelLimit: 8 },
  medium: { maxTicks: 7, legendVisible: true, labelLimit: null },
  wide: { maxTicks: null, legendVisible: true, labelLimit: null },
};

function barSpec(categories: string[], size: SizeClass | null): ChartSpec {
  const variant = SIZE_VARIANTS[size ?? 'wide'];
  const x = {
    field: 'region', type: 'nominal' as const,
    maxTicks: size === null ? null : variant.maxTicks,
    labelLimit: size === null ? null : variant.labelLimit,
  };
  const y = { field: 'value', type: 'quantitative' as const, maxTicks: null, labelLimit: null };
  const color = {
    field: 'region', type: 'nominal',
    legend: size === null ? true : variant.legendVisible,
    scale: null,
  };
  const encodings = { x, y, color };
  return {
    mark: 'bar',
    layers: [{ mark: 'bar', encodings }],
    encodings,
    inlineData: categories.map((c, i) => ({ region: c, value: (i + 1) * 10 })),
    sizeVariants: SIZE_VARIANTS,
    colorScale: null,
    size,
    bestEffort: false,
  };
}

describe('size classes', () => {
  it('matches the service breakpoints', () => {
    expect(sizeClassForWidth(300)).toBe('narrow');
    expect(sizeClassForWidth(319)).toBe('narrow');
    expect(sizeClassForWidth(320)).toBe('medium');
    expect(sizeClassForWidth(599)).toBe('medium');
    expect(sizeClassForWidth(600)).toBe('wide');
    expect(sizeClassForWidth(1400)).toBe('wide');
  });
});

describe('chart renderer', () => {
  const categories = Array.from({ length: 12 }, (_, i) => `category-${String(i).padStart(2, '0')}`);

  it('renders every category tick and a legend in wide', () => {
    const svg = renderChart(barSpec(categories, null), { width: 640 });
    expect(countXTicks(svg)).toBe(12);
    expect(hasLegend(svg)).toBe(true);
  });

  it('narrow variant shows at most 4 ticks and no legend', () => {
    const svg = renderChart(barSpec(categories, 'narrow'), { width: 300 });
    expect(countXTicks(svg)).toBeLessThanOrEqual(4);
    expect(hasLegend(svg)).toBe(false);
  });

  it('narrow variant elides labels to 8 characters', () => {
    const svg = renderChart(barSpec(categories, 'narrow'), { width: 300 });
    const labels = [...svg.matchAll(/tick-x" [^>]*>([^<]*)<\/text>/g)].map((m) => m[1]);
    expect(labels.length).toBeGreaterThan(0);
    for (const label of labels) {
      expect(label!.length).toBeLessThanOrEqual(8);
    }
  });

  it('medium tick budget sits between narrow and wide', () => {
    const narrow = countXTicks(renderChart(barSpec(categories, 'narrow'), { width: 300 }));
    const medium = countXTicks(renderChart(barSpec(categories, 'medium'), { width: 480 }));
    const wide = countXTicks(renderChart(barSpec(categories, null), { width: 640 }));
    expect(narrow).toBeLessThanOrEqual(medium);
    expect(medium).toBeLessThanOrEqual(wide);
  });

  it('draws data values verbatim in big-number specs', () => {
    const encodings = {
      text: { field: 'value', type: 'quantitative' as const, maxTicks: null, labelLimit: null },
    };
    const spec: ChartSpec = {
      mark: 'text',
      layers: [
        { mark: 'band', encodings: {
          y: { field: 'thresholdLow', type: 'quantitative', maxTicks: null, labelLimit: null },
          y2: { field: 'thresholdHigh', type: 'quantitative', maxTicks: null, labelLimit: null },
          color: { value: '#f2e9c9' },
        } },
        { mark: 'text', encodings },
      ],
      encodings,
      inlineData: [{ value: 550, thresholdLow: 400, thresholdHigh: 600 }],
      sizeVariants: SIZE_VARIANTS,
      colorScale: null,
      size: null,
      bestEffort: false,
    };
    const svg = renderChart(spec);
    // The number shown is the API's value, untouched.
    expect(svg).toContain('>550<');
    expect(svg).toContain('range 400 to 600');
  });

  it('renders tables from the columns encoding', () => {
    const spec: ChartSpec = {
      mark: 'table',
      layers: [{ mark: 'table', encodings: { columns: { fields: ['region', 'value'] } } }],
      encodings: { columns: { fields: ['region', 'value'] } },
      inlineData: [{ region: 'East', value: 574 }],
      sizeVariants: SIZE_VARIANTS,
      colorScale: null,
      size: null,
      bestEffort: false,
    };
    const html = renderChart(spec);
    expect(html).toContain('<table');
    expect(html).toContain('<td>East</td>');
    expect(html).toContain('<td>574</td>');
  });

  it('uses bound color scales without inventing colors', () => {
    const spec = barSpec(['East', 'West'], null);
    spec.colorScale = {
      name: 'regions', kind: 'categorical',
      mapping: { East: '#1f77b4', West: '#ff7f0e' }, fallbackAssigned: [],
    };
    const svg = renderChart(spec, { width: 480 });
    expect(svg).toContain('#1f77b4');
    expect(svg).toContain('#ff7f0e');
  });
});
