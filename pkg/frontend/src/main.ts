#!/usr/bin/env node
// Stdio worker entry point.
//
// Usage: statement-checker-bridge [--lexicon <file>]...
//
// Lexicon files carry one identifier per line (# comments allowed); without
// any file a small built-in demo lexicon is used.

import * as fs from "fs";
import * as readline from "readline";

import { DEFAULT_LEXICON, StatementChecker } from "./checker";
import { encodeResponse, handleLine } from "./protocol";

function loadLexicon(paths: string[]): Set<string> {
  if (paths.length === 0) return new Set(DEFAULT_LEXICON);
  const names = new Set<string>();
  for (const path of paths) {
    const text = fs.readFileSync(path, "utf-8");
    for (const line of text.split("\n")) {
      const name = line.trim();
      if (name !== "" && !name.startsWith("#")) names.add(name);
    }
  }
  return names;
}

function parseArgs(argv: string[]): { lexicons: string[] } {
  const lexicons: string[] = [];
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--lexicon") {
      const value = argv[i + 1];
      if (value === undefined) {
        process.stderr.write("--lexicon needs a file path\n");
        process.exit(2);
      }
      lexicons.push(value);
      i++;
    } else {
      process.stderr.write(`unknown argument ${argv[i]}\n`);
      process.exit(2);
    }
  }
  return { lexicons };
}

export function serve(): void {
  const { lexicons } = parseArgs(process.argv.slice(2));
  let checker: StatementChecker;
  try {
    checker = new StatementChecker(loadLexicon(lexicons));
  } catch (err) {
    process.stderr.write(`failed to load lexicon: ${String(err)}\n`);
    process.exit(2);
  }

  process.stdout.write(JSON.stringify({ ready: true }) + "\n");

  const rl = readline.createInterface({ input: process.stdin, terminal: false });
  rl.on("line", (line) => {
    let response;
    try {
      response = handleLine(line, checker);
    } catch (err) {
      // a request must never kill the worker
      response = { id: -1, status: "failed" as const, diagnostics: [`internal error: ${String(err)}`] };
    }
    if (response !== null) {
      process.stdout.write(encodeResponse(response) + "\n");
    }
  });
  rl.on("close", () => process.exit(0));
}

if (require.main === module) {
  serve();
}
