/** Raw-token access into a JSON response body.
 *
 * The workbench's no-divergence rule: every number shown on screen must be
 * byte-equal to the service response. JSON.parse loses the original
 * formatting (1e-07 vs 1e-7, trailing digits), so RawDoc scans the body once
 * and maps each primitive's path to its exact source slice for display.
 */

export type JsonPath = (string | number)[];

export function pathKey(path: JsonPath): string {
  return JSON.stringify(path);
}

export class RawDoc {
  readonly text: string;
  readonly value: unknown;
  private readonly tokens = new Map<string, string>();

  constructor(text: string) {
    this.text = text;
    this.value = JSON.parse(text);
    new Scanner(text, this.tokens).scan();
  }

  /** Exact source token of the primitive at `path`, or undefined for
   * objects/arrays/missing paths. String tokens are returned unquoted. */
  token(path: JsonPath): string | undefined {
    return this.tokens.get(pathKey(path));
  }

  /** Parsed value at `path` (structure access only; display must use token). */
  at(path: JsonPath): unknown {
    let node: unknown = this.value;
    for (const step of path) {
      if (node === null || typeof node !== "object") return undefined;
      node = (node as Record<string | number, unknown>)[step];
    }
    return node;
  }
}

const DELIMITERS = new Set([",", "}", "]", " ", "\t", "\n", "\r"]);

class Scanner {
  private pos = 0;

  constructor(
    private readonly text: string,
    private readonly out: Map<string, string>,
  ) {}

  scan(): void {
    this.skipWs();
    this.value([]);
  }

  private value(path: JsonPath): void {
    const c = this.text[this.pos];
    if (c === "{") {
      this.object(path);
    } else if (c === "[") {
      this.array(path);
    } else if (c === '"') {
      const start = this.pos;
      this.string();
      // store string tokens without their quotes: that is what gets rendered
      this.out.set(pathKey(path), JSON.parse(this.text.slice(start, this.pos)) as string);
    } else {
      const start = this.pos;
      while (this.pos < this.text.length && !DELIMITERS.has(this.text[this.pos]!)) {
        this.pos++;
      }
      this.out.set(pathKey(path), this.text.slice(start, this.pos));
    }
  }

  private object(path: JsonPath): void {
    this.pos++; // {
    this.skipWs();
    if (this.text[this.pos] === "}") {
      this.pos++;
      return;
    }
    for (;;) {
      this.skipWs();
      const keyStart = this.pos;
      this.string();
      const key = JSON.parse(this.text.slice(keyStart, this.pos)) as string;
      this.skipWs();
      this.pos++; // :
      this.skipWs();
      this.value([...path, key]);
      this.skipWs();
      if (this.text[this.pos] === ",") {
        this.pos++;
        continue;
      }
      this.pos++; // }
      return;
    }
  }

  private array(path: JsonPath): void {
    this.pos++; // [
    this.skipWs();
    if (this.text[this.pos] === "]") {
      this.pos++;
      return;
    }
    let index = 0;
    for (;;) {
      this.skipWs();
      this.value([...path, index]);
      index++;
      this.skipWs();
      if (this.text[this.pos] === ",") {
        this.pos++;
        continue;
      }
      this.pos++; // ]
      return;
    }
  }

  private string(): void {
    this.pos++; // opening quote
    while (this.pos < this.text.length) {
      const c = this.text[this.pos];
      if (c === "\\") {
        this.pos += 2;
      } else if (c === '"') {
        this.pos++;
        return;
      } else {
        this.pos++;
      }
    }
    throw new SyntaxError("unterminated string in JSON body");
  }

  private skipWs(): void {
    while (this.pos < this.text.length && " \t\n\r".includes(this.text[this.pos]!)) {
      this.pos++;
    }
  }
}
