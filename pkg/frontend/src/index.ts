export { column, readTable, SchemaError, Table } from "./csv";
export {
  defaultLabel,
  Lambda2Series,
  loadLambda2Series,
  plotLambda2,
  renderLambda2,
} from "./lambda2";
export { loadSizes, plotSizes, renderSizes, SizeSeries } from "./nsize";
export { AgentPath, finalEdges, loadPaths, plotPaths, renderPaths } from "./paths";
export {
  colorFor,
  drawAxes,
  drawLegend,
  FRAME,
  linTicks,
  logTicks,
  padRange,
  PALETTE,
  SvgDoc,
} from "./svg";
