export { readTable, type ColumnSpec, type Table, type Cell } from "./csv.js";
export { EmptyTableError, SchemaError } from "./errors.js";
export {
  planFigures,
  renderAll,
  renderFigure,
  TABLE_COLUMNS,
  type FigureKind,
  type FigureSpec,
} from "./figures.js";
export { loadManifest, type Manifest, type ManifestOutput, type SourceMark } from "./manifest.js";
export { heatmap, lineChart, type Series, type SeriesPoint } from "./svg.js";
export { runCli, type Io } from "./cli.js";
