public class PagedLambdaView {
  private int pageSize;
  private PageView view;

  private void registerWidgetHandlers() {
    view.resetPageButton().addActionListener(
        e -> requestData(pageSize, null));

    view.previousPageButton().addActionListener(e -> {
      if (hasPreviousBookmark())
        requestData(pageSize, getPreviousBookmark());
    });

    //...
  }

  private boolean hasPreviousBookmark() { return false; }
  private String getPreviousBookmark() { return null; }
  private void requestData(int size, String bookmark) { }
}
