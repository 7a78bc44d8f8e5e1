/** Input does not match the versioned table/manifest layout. */
export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

/** A table parsed fine but carries no data rows, so there is nothing to draw. */
export class EmptyTableError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "EmptyTableError";
  }
}
