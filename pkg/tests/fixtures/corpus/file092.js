function process(data) {
  var result = data.map(transform);
  result.sort();
  return result;
}
function transform(value) {
  return value.length;
}
