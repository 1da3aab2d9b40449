import { describe, expect, it } from "vitest";

import { fileLabel, parseMetricsCsv, SchemaError } from "../src/csv";

const HEADER = "T,max_err,min_err,mean_consensus,max_gradnorm,empirical_G";

describe("parseMetricsCsv", () => {
  it("parses metadata, header, and rows", () => {
    const text = [
      "# preset = fig1-ls",
      "# seed = 0",
      HEADER,
      "100,0.5,0.4,0.01,0.2,0.3",
      "250,0.25,0.2,0.005,0.2,0.3",
      "",
    ].join("\n");
    const file = parseMetricsCsv(text, "fig1.csv");
    expect(file.meta.preset).toBe("fig1-ls");
    expect(file.rows).toHaveLength(2);
    expect(file.rows[0].T).toBe(100);
    expect(file.rows[1].min_err).toBeCloseTo(0.2, 12);
    expect(fileLabel(file)).toBe("fig1-ls");
  });

  it("accepts a header-only file", () => {
    const file = parseMetricsCsv(`${HEADER}\n`, "empty.csv");
    expect(file.rows).toHaveLength(0);
  });

  it("names the offending column on header mismatch", () => {
    const text = "T,max_err,min_err,consensus,max_gradnorm,empirical_G\n";
    try {
      parseMetricsCsv(text, "bad.csv");
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(SchemaError);
      expect((err as SchemaError).column).toBe("mean_consensus");
    }
  });

  it("rejects extra columns", () => {
    expect(() => parseMetricsCsv(`${HEADER},bonus\n`, "x.csv")).toThrowError(/bonus/);
  });

  it("names the column holding a non-numeric cell", () => {
    const text = `${HEADER}\n100,0.5,oops,0.01,0.2,0.3\n`;
    try {
      parseMetricsCsv(text, "bad.csv");
      expect.unreachable();
    } catch (err) {
      expect((err as SchemaError).column).toBe("min_err");
    }
  });

  it("rejects a missing header", () => {
    expect(() => parseMetricsCsv("100,1,2,3,4,5\n", "x.csv")).toThrowError(/column T/);
  });

  it("falls back to the file stem for labels", () => {
    const file = parseMetricsCsv(`${HEADER}\n`, "/tmp/run-a.csv");
    expect(fileLabel(file)).toBe("run-a");
  });
});
