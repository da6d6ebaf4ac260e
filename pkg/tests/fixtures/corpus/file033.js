/* configuration block 33 */
var options33 = {
  width33: 10,
  height33: 20,
  resize33: function(scale33) {
    return scale33 * options33.width33;
  }
};
options33.resize33(2);
