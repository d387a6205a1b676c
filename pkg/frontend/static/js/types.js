/** Wire types for the capassess HTTP API, field for field.
 *
 * Everything here mirrors the JSON the service emits. The UI never
 * derives numbers from these payloads; it displays them as received.
 */
export {};
